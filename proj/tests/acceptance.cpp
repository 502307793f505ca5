// Acceptance suite. Prints one [PASS]/[FAIL] line per criterion (with indented
// detail lines underneath) and exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "geoaudit/auditor.hpp"
#include "geoaudit/baselines.hpp"
#include "geoaudit/capacity.hpp"
#include "geoaudit/dataprep.hpp"
#include "geoaudit/pipeline.hpp"
#include "geoaudit/stresstest.hpp"
#include "helpers.hpp"

using namespace geoaudit;
namespace fs = std::filesystem;

namespace {

const fs::path kAdult = fs::path(GEOAUDIT_DATA_DIR) / "adult.data";
const fs::path kConfigs = GEOAUDIT_CONFIG_DIR;

struct Outcome {
    bool pass = false;
    std::string summary;
    std::vector<std::string> details;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double sum_abs(const std::vector<double>& w) {
    double s = 0.0;
    for (double v : w) s += std::abs(v);
    return s;
}

ExperimentConfig adult_config(std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.source.path = kAdult;
    cfg.seed = seed;
    return cfg;
}

TrainConfig seeded(TrainConfig cfg, std::uint64_t seed) {
    cfg.seed = seed;
    return cfg;
}

// Adult split for one experiment seed, audited and pruned the way the pipeline does it.
struct AdultRun {
    IngestResult data;
    AuditReport audit;
    DatasetMatrix pruned_train, pruned_test;
};

AdultRun adult_run(std::uint64_t seed) {
    AdultRun r;
    r.data = ingest(adult_config(seed));
    r.audit = run_audit(r.data.train, seeded(TrainConfig::probe_defaults(), seed));
    std::set<std::string> flagged(r.audit.flagged.begin(), r.audit.flagged.end());
    r.pruned_train = drop_features(r.data.train, flagged);
    r.pruned_test = drop_features(r.data.test, flagged);
    return r;
}

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
    return "{" + out + "}";
}

std::string curve_text(const CapacityCurve& c) {
    std::string out;
    for (const auto& p : c.points) out += fmt(" N=%zu:%.4f", p.hidden_width, p.test_accuracy);
    return out;
}

// ---------------------------------------------------------------------------

Outcome c1_gradients() {
    Outcome o;
    auto data = testing_helpers::random_data(16, 6, 2024);
    double worst = check_gradients(ModelKind::Linear, data, 1e-5);
    o.details.push_back(fmt("linear: %.3e", worst));
    for (std::size_t w : {1, 8, 32}) {
        const double e = check_gradients(ModelKind::Mlp, data, 1e-5, w);
        o.details.push_back(fmt("mlp N=%zu: %.3e", w, e));
        worst = std::max(worst, e);
    }
    o.pass = worst < 1e-4;
    o.summary = fmt("max relative error %.3e (need < 1e-4)", worst);
    return o;
}

Outcome c2_xor_detection() {
    Outcome o;
    int exact = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto data = gen_xor_shortcut(2000, 1.0, 0.0, seed);
        auto r = run_audit(data, seeded(TrainConfig::probe_defaults(), seed));
        if (r.flagged == std::vector<std::string>{"shortcut"})
            ++exact;
        else
            o.details.push_back(fmt("seed %llu flagged %s", (unsigned long long)seed, join(r.flagged).c_str()));
    }
    o.pass = exact >= 95;
    o.summary = fmt("flagged exactly {shortcut} in %d/100 seeds (need >= 95)", exact);
    return o;
}

Outcome c3_xor_transition() {
    Outcome o;
    auto d = drop_features(gen_xor_shortcut(2000, 1.0, 0.0, 0), {"shortcut"});
    auto s = split(d, 0.8, 0);
    SweepOptions opt;
    opt.widths = {1, 4, 8, 16};
    opt.seeds_per_point = 5;
    opt.aggregation = Aggregation::Best;
    auto curve = sweep_capacity(s.train, s.test, TrainConfig::mlp_defaults(), opt);
    o.details.push_back("best-of-5 test accuracy:" + curve_text(curve));
    bool ok = curve.points[0].test_accuracy <= 0.80;
    for (std::size_t i = 1; i < curve.points.size(); ++i) ok = ok && curve.points[i].test_accuracy >= 0.95;
    o.pass = ok;
    o.summary = fmt("N=1 %.4f (need <= 0.80), N=4 %.4f (need >= 0.95 for all N >= 4)", curve.points[0].test_accuracy,
                    curve.points[1].test_accuracy);
    return o;
}

Outcome c4_adult_audit() {
    Outcome o;
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto data = ingest(adult_config(seed));
        auto r = run_audit(data.train, seeded(TrainConfig::probe_defaults(), seed));
        hits += r.is_flagged("capital-gain");
        auto idx = std::find(r.feature_names.begin(), r.feature_names.end(), "capital-gain") - r.feature_names.begin();
        o.details.push_back(fmt("seed %llu: |w_cg|=%.3f tau=%.3f flagged=%s", (unsigned long long)seed,
                                r.abs_weights[idx], r.tau, join(r.flagged).c_str()));
    }
    o.pass = hits >= 9;
    o.summary = fmt("capital-gain flagged in %d/10 seeds (need >= 9)", hits);
    return o;
}

Outcome c5_adult_capacity() {
    Outcome o;
    auto r = adult_run(0);
    SweepOptions opt;
    opt.widths = {1, 2, 4, 8, 16, 32};
    opt.seeds_per_point = 3;
    opt.aggregation = Aggregation::Mean;
    opt.variant_label = "baseline";
    auto baseline = sweep_capacity(r.data.train, r.data.test, TrainConfig::mlp_defaults(), opt);
    opt.variant_label = "pruned";
    auto pruned = sweep_capacity(r.pruned_train, r.pruned_test, TrainConfig::mlp_defaults(), opt);
    auto tb = detect_transition(baseline, 0.01);
    auto tp = detect_transition(pruned, 0.01);
    const double acc32 = pruned.points.back().test_accuracy;
    o.details.push_back("pruned away: " + join(r.audit.flagged) + fmt(" (D=%zu)", r.pruned_train.dims()));
    o.details.push_back("baseline mean-of-3:" + curve_text(baseline));
    o.details.push_back("pruned   mean-of-3:" + curve_text(pruned));
    const bool acc_ok = acc32 >= 0.80 && acc32 <= 0.85;
    const bool pruned_ok = tp.critical_width && *tp.critical_width >= 8;
    const bool base_ok = tb.critical_width && *tb.critical_width <= 2;
    o.details.push_back(fmt("pruned N=32 accuracy in [0.80, 0.85]: %s", acc_ok ? "yes" : "no"));
    o.details.push_back(fmt("pruned critical width >= 8: %s", pruned_ok ? "yes" : "no"));
    o.details.push_back(fmt("baseline critical width <= 2: %s", base_ok ? "yes" : "no"));
    o.pass = acc_ok && pruned_ok && base_ok;
    o.summary = fmt("pruned N=32 acc %.4f; critical width pruned=%zu (need >= 8), baseline=%zu (need <= 2)", acc32,
                    tp.critical_width.value_or(0), tb.critical_width.value_or(0));
    return o;
}

struct StressNumbers {
    std::vector<CounterfactualReport> reports;
};

StressNumbers stress_for_seed(std::uint64_t seed) {
    auto r = adult_run(seed);
    auto cfg = seeded(TrainConfig::mlp_defaults(), seed);
    auto base = train_mlp(r.data.train, 32, cfg).model;
    auto robust = train_mlp(r.pruned_train, 32, cfg).model;
    return {stress_suite(Model{base}, r.data.test, Model{robust}, r.pruned_test, StressScenarios{})};
}

std::vector<StressNumbers>& stress_runs() {
    static std::vector<StressNumbers> runs = [] {
        std::vector<StressNumbers> v;
        for (std::uint64_t seed = 0; seed < 3; ++seed) v.push_back(stress_for_seed(seed));
        return v;
    }();
    return runs;
}

const CounterfactualReport& find(const StressNumbers& s, const std::string& scenario, const std::string& model) {
    for (const auto& r : s.reports)
        if (r.scenario == scenario && r.model_label == model) return r;
    throw std::runtime_error("missing report " + scenario + "/" + model);
}

Outcome c6_leak_stress() {
    Outcome o;
    const auto& s = stress_runs().front();
    const auto& b = find(s, "capital-gain-injection", "baseline");
    const auto& r = find(s, "capital-gain-injection", "robust");
    o.details.push_back(fmt("baseline: %zu/%zu flipped", b.flipped, b.eligible_rows));
    o.details.push_back(fmt("robust:   %zu/%zu flipped, structurally immune=%s", r.flipped, r.eligible_rows,
                            r.structurally_immune ? "yes" : "no"));
    o.pass = b.flip_rate >= 90.0 && r.flip_rate == 0.0;
    o.summary = fmt("baseline flip rate %.2f%% (need >= 90%%), robust %.2f%% (need exactly 0%%)", b.flip_rate,
                    r.flip_rate);
    return o;
}

Outcome c7_husband_stress() {
    Outcome o;
    std::vector<double> base, robust;
    for (std::size_t i = 0; i < stress_runs().size(); ++i) {
        const auto& s = stress_runs()[i];
        const auto& b = find(s, "relationship=Husband-override", "baseline");
        const auto& r = find(s, "relationship=Husband-override", "robust");
        base.push_back(b.flip_rate);
        robust.push_back(r.flip_rate);
        o.details.push_back(fmt("seed %zu: baseline %zu/%zu = %.2f%%, robust %zu/%zu = %.2f%%", i, b.flipped,
                                b.eligible_rows, b.flip_rate, r.flipped, r.eligible_rows, r.flip_rate));
    }
    const double mb = mean(base), mr = mean(robust);
    o.pass = mr <= 0.7 * mb;
    o.summary = fmt("mean flip rate baseline %.2f%%, robust %.2f%% (need robust <= 0.7 x baseline = %.2f%%)", mb, mr,
                    0.7 * mb);
    return o;
}

Outcome c8_l1_shape() {
    Outcome o;
    std::vector<double> sparsity;
    bool shrinks = true;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        auto data = ingest(adult_config(seed));
        auto cfg = seeded(TrainConfig::probe_defaults(), seed);
        auto audit = run_audit(data.train, cfg);
        auto l1 = train_l1_probe(data.train, 0.05, cfg).model;
        auto plain = train_linear(data.train, cfg).model;
        auto cmp = compare_importance(audit, l1);
        sparsity.push_back(cmp.l1_sparsity);
        const double s1 = sum_abs(l1.weights), s0 = sum_abs(plain.weights);
        shrinks = shrinks && s1 < s0;
        o.details.push_back(fmt("seed %llu: sparsity %.3f, sum|w| %.3f vs unregularized %.3f, L1 top %s, auditor top %s",
                                (unsigned long long)seed, cmp.l1_sparsity, s1, s0, cmp.l1_top.c_str(),
                                cmp.auditor_top.c_str()));
    }
    const double ms = mean(sparsity);
    o.pass = ms >= 0.5 && shrinks;
    o.summary = fmt("mean l1_sparsity %.3f over 3 seeds (need >= 0.5); sum|w| below unregularized on every seed: %s",
                    ms, shrinks ? "yes" : "no");
    return o;
}

Outcome c9_jtt_cost() {
    Outcome o;
    auto data = ingest(adult_config(0));
    auto mlp_cfg = seeded(TrainConfig::mlp_defaults(), 0);
    auto probe_cfg = seeded(TrainConfig::probe_defaults(), 0);

    CostReport erm;
    erm.method = "erm";
    auto erm_model = train_mlp(data.train, 32, mlp_cfg);
    erm.add_phase(erm_model.stats.epochs_run(), erm_model.stats.parameters, 0.0);

    JttConfig jtt{5.0, mlp_cfg.epochs, mlp_cfg.epochs};
    auto j = run_jtt(data.train, 32, jtt, mlp_cfg);

    auto probe = train_linear(data.train, probe_cfg);
    const double probe_cost = static_cast<double>(probe.stats.parameters) * probe.stats.epochs_run();
    const double probe_fraction = probe_cost / erm.parameter_epochs;

    auto rel = cost_compare({erm, j.cost});
    double jtt_rel = 0.0;
    for (const auto& r : rel)
        if (r.method == "jtt") jtt_rel = r.epochs;
    o.details.push_back(fmt("ERM: %zu epochs, %zu params, %.0f param-epochs", erm.epochs_total,
                            erm.trained_parameters_total, erm.parameter_epochs));
    o.details.push_back(fmt("JTT: phases %zu+%zu epochs, %zu misclassified rows upweighted", j.cost.phase_epochs[0],
                            j.cost.phase_epochs[1], j.misclassified));
    o.details.push_back(fmt("probe: %zu params x %zu epochs = %.0f param-epochs", probe.stats.parameters,
                            probe.stats.epochs_run(), probe_cost));
    o.pass = j.cost.epochs_total == 2 * erm.epochs_total && jtt_rel == 2.0 && probe_fraction < 0.05;
    o.summary = fmt("JTT epochs %.1fx ERM (need 2.0x); probe adds %.2f%% of ERM parameter-epochs (need < 5%%)", jtt_rel,
                    100.0 * probe_fraction);
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome c10_determinism() {
    Outcome o;
    auto root = fs::temp_directory_path() / "geoaudit-acceptance";
    fs::remove_all(root);

    auto xor_cfg = load_config(kConfigs / "xor.ini");
    // A cut-down Adult run that still exercises every stage.
    auto adult_cfg = load_config(kConfigs / "adult.ini");
    adult_cfg.probe.epochs = 30;
    adult_cfg.mlp.epochs = 10;
    adult_cfg.jtt.phase1_epochs = adult_cfg.jtt.phase2_epochs = 10;
    adult_cfg.sweep.widths = {1, 4, 16};
    adult_cfg.sweep.seeds_per_point = 2;

    bool all_same = true;
    for (auto [name, base] : {std::pair{"xor", xor_cfg}, std::pair{"adult", adult_cfg}}) {
        std::string first[2];
        for (int run = 0; run < 2; ++run) {
            auto cfg = base;
            cfg.output_dir = root / (std::string(name) + std::to_string(run));
            run_pipeline(cfg, parse_stages("all"));
            const std::string a = slurp(cfg.output_dir / "audit.json");
            const std::string c = slurp(cfg.output_dir / "capacity.csv");
            if (a.empty() || c.empty()) throw std::runtime_error(std::string(name) + ": missing report");
            if (run == 0) {
                first[0] = a;
                first[1] = c;
            } else {
                const bool same = a == first[0] && c == first[1];
                all_same = all_same && same;
                o.details.push_back(fmt("%s: audit.json %s, capacity.csv %s", name,
                                        a == first[0] ? "identical" : "DIFFERS", c == first[1] ? "identical" : "DIFFERS"));
            }
        }
    }
    fs::remove_all(root);
    o.pass = all_same;
    o.summary = all_same ? "two runs per config produced byte-identical audit.json and capacity.csv"
                         : "outputs differ between identical runs";
    return o;
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double time_limit_s;  // 0 = no runtime bound
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "gradient correctness", c1_gradients, 5.0},
        {2, "synthetic shortcut detection", c2_xor_detection, 120.0},
        {3, "synthetic phase transition", c3_xor_transition, 0.0},
        {4, "Adult audit flags capital-gain", c4_adult_audit, 0.0},
        {5, "Adult capacity plateau", c5_adult_capacity, 600.0},
        {6, "leakage stress", c6_leak_stress, 0.0},
        {7, "demographic stress", c7_husband_stress, 0.0},
        {8, "L1 baseline shape", c8_l1_shape, 0.0},
        {9, "JTT cost", c9_jtt_cost, 0.0},
        {10, "determinism", c10_determinism, 0.0},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.summary = std::string("error: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit_s > 0 && secs >= c.time_limit_s) {
            o.pass = false;
            o.summary += fmt(" [runtime %.1f s exceeds %.0f s]", secs, c.time_limit_s);
        }
        failures += !o.pass;
        std::printf("[%s] C%d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.summary.c_str(), secs);
        for (const auto& d : o.details) std::printf("       %s\n", d.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
