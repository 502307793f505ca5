#include "geoaudit/dataset.hpp"

#include <string>

namespace geoaudit {

void validate(const DatasetMatrix& data) {
    if (data.feature_names.size() != data.dims())
        fail(ErrorKind::Data, "feature_names has " + std::to_string(data.feature_names.size()) +
                                  " entries but the matrix has " + std::to_string(data.dims()) +
                                  " columns");
    if (data.targets.size() != data.rows())
        fail(ErrorKind::Data, "targets length " + std::to_string(data.targets.size()) +
                                  " does not match row count " + std::to_string(data.rows()));
    for (std::size_t i = 0; i < data.targets.size(); ++i)
        if (data.targets[i] > 1)
            fail(ErrorKind::Data, "non-binary target at row " + std::to_string(i));
}

std::string_view onehot_group(std::string_view feature_name) {
    auto pos = feature_name.find('=');
    if (pos == std::string_view::npos) return {};
    return feature_name.substr(0, pos);
}

} // namespace geoaudit
