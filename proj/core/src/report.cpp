#include "pure/report.hpp"

#include <json.hpp>

namespace pure {

namespace {

using ojson = nlohmann::ordered_json;

ojson purify_config_json(const PurifyConfig& cfg)
{
    ojson j;
    j["k"] = cfg.remove_k;
    j["alpha"] = cfg.alpha;
    j["backend"] = to_string(cfg.backend);
    j["r"] = cfg.rsvd.sketch_width;
    j["q"] = cfg.rsvd.power_iters;
    j["seed"] = cfg.rsvd.seed.value;
    j["pooling"] = to_string(cfg.pooling);
    j["min_tokens"] = cfg.min_tokens_for_removal;
    j["center_first"] = cfg.center_first;
    return j;
}

ojson synth_config_json(const SynthConfig& cfg)
{
    ojson j;
    j["n_instances"] = cfg.n_instances;
    j["tokens_per_instance"] = cfg.tokens_per_instance;
    j["dim"] = cfg.dim;
    j["dominant_scale"] = cfg.dominant_scale;
    j["class_separation"] = cfg.class_separation;
    j["seed"] = cfg.seed.value;
    return j;
}

std::string dump(const ojson& j)
{
    return j.dump(2) + "\n";
}

}  // namespace

std::string metrics_json(const MetricsReport& rep, QueryAverage mode)
{
    ojson j;
    j["acc"] = round2(rep.acc);
    ojson attacks = ojson::object();
    for (const auto& a : rep.attacks) {
        ojson m;
        m["aua"] = round2(a.aua);
        m["asr"] = round2(a.asr);
        m["avgq"] = round2(a.avgq);
        m["pdr"] = round2(a.pdr);
        attacks[a.attack] = std::move(m);
    }
    j["attacks"] = std::move(attacks);
    j["apdr"] = round2(rep.apdr);
    j["avgq_over"] = mode == QueryAverage::AllAttacked ? "attacked" : "successful";
    return dump(j);
}

std::string isotropy_json(const IsotropyReport& rep, std::size_t n_pairs, RngSeed seed, std::size_t instances,
                          const PurifyConfig* purified_with)
{
    ojson j;
    j["unadjusted"] = rep.unadjusted;
    j["anisotropy_estimate"] = rep.anisotropy_estimate;
    j["adjusted"] = rep.adjusted;
    j["pc_variance_shares"] = rep.pc_variance_shares;
    j["dim_dominance"] = rep.dim_dominance;
    ojson cfg;
    cfg["instances"] = instances;
    cfg["pairs"] = n_pairs;
    cfg["seed"] = seed.value;
    cfg["purify"] = purified_with ? purify_config_json(*purified_with) : ojson(nullptr);
    j["config"] = std::move(cfg);
    return dump(j);
}

std::string purify_report_json(const PurifyConfig& cfg, const InstanceBatch& batch,
                               const std::vector<PurifiedInstance>& out)
{
    ojson j;
    j["config"] = purify_config_json(cfg);
    j["instances"] = out.size();
    j["dim"] = batch.dim();
    std::size_t removed_total = 0;
    std::size_t shortfall_total = 0;
    ojson items = ojson::array();
    for (std::size_t i = 0; i < out.size(); ++i) {
        ojson item;
        item["id"] = batch.ids.empty() ? std::to_string(i) : batch.ids[i];
        item["tokens"] = batch.spans[i].length;
        std::vector<double> sigmas;
        for (const auto& r : out[i].removed)
            sigmas.push_back(r.sigma);
        item["removed_sigma"] = sigmas;
        item["shortfall"] = out[i].shortfall;
        removed_total += out[i].removed.size();
        shortfall_total += out[i].shortfall;
        items.push_back(std::move(item));
    }
    j["removed_total"] = removed_total;
    j["shortfall_total"] = shortfall_total;
    j["per_instance"] = std::move(items);
    return dump(j);
}

std::string bench_json(const RunConfig& cfg, const std::vector<BenchRun>& runs)
{
    ojson j;
    ojson c;
    c["synth"] = synth_config_json(cfg.synth);
    c["purify"] = purify_config_json(cfg.purify);
    c["epsilon"] = cfg.bench.epsilon;
    c["seeds"] = cfg.bench.n_seeds;
    j["config"] = std::move(c);

    ojson list = ojson::array();
    for (const auto& r : runs) {
        ojson item;
        item["seed"] = r.seed;
        item["direction_mode"] = to_string(r.report.direction_mode);
        item["epsilon"] = r.report.epsilon;
        item["flip_rate_baseline"] = r.report.flip_rate_baseline;
        item["flip_rate_purified"] = r.report.flip_rate_purified;
        list.push_back(std::move(item));
    }
    j["runs"] = std::move(list);

    ojson summary = ojson::object();
    for (auto mode : cfg.bench.modes) {
        std::size_t n = 0;
        std::size_t purified_lower = 0;
        double base = 0.0;
        double pur = 0.0;
        for (const auto& r : runs) {
            if (r.report.direction_mode != mode)
                continue;
            ++n;
            base += r.report.flip_rate_baseline;
            pur += r.report.flip_rate_purified;
            if (r.report.flip_rate_purified < r.report.flip_rate_baseline)
                ++purified_lower;
        }
        ojson s;
        s["runs"] = n;
        s["purified_lower"] = purified_lower;
        s["mean_flip_rate_baseline"] = n ? base / static_cast<double>(n) : 0.0;
        s["mean_flip_rate_purified"] = n ? pur / static_cast<double>(n) : 0.0;
        summary[std::string(to_string(mode))] = std::move(s);
    }
    j["summary"] = std::move(summary);
    return dump(j);
}

}  // namespace pure
