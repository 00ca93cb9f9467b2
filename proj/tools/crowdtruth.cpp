#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crowdtruth/baselines.hpp"
#include "crowdtruth/checkpoint.hpp"
#include "crowdtruth/clustering.hpp"
#include "crowdtruth/dataset.hpp"
#include "crowdtruth/evaluation.hpp"
#include "crowdtruth/link.hpp"
#include "crowdtruth/sdr.hpp"
#include "crowdtruth/subjectivity.hpp"
#include "crowdtruth/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace crowdtruth;

namespace {

// Flags beat config-file values beat defaults. The config JSON uses the
// long option names without the leading dashes.
class ConfigOverlay {
  public:
    void attach(CLI::App* cmd) {
        cmd->add_option("--config", path_, "JSON config file; flags given on the command line win");
    }

    void load() {
        if (path_.empty()) return;
        std::ifstream in(path_);
        if (!in) throw std::runtime_error("config not found: " + path_);
        in >> doc_;
    }

    template <typename T>
    void apply(const CLI::Option* opt, const char* key, T& var) const {
        if (doc_.is_null() || opt->count() > 0 || !doc_.contains(key)) return;
        var = doc_.at(key).get<T>();
    }

  private:
    std::string path_;
    json doc_;
};

struct DatasetArgs {
    std::string data_path;
    std::string format = "csv";
    CLI::Option* data_opt = nullptr;
    CLI::Option* format_opt = nullptr;

    void attach(CLI::App* cmd, bool required = true) {
        data_opt = cmd->add_option("--data", data_path, "response CSV/JSONL file");
        if (required) data_opt->required();
        format_opt = cmd->add_option("--format", format, "data format: csv or jsonl");
    }

    ResponseMatrix load() const {
        if (!fs::exists(data_path)) {
            std::cerr << "dataset not found: " << data_path << "\n";
            std::exit(2);
        }
        auto fmt = format == "jsonl" ? ResponseFormat::jsonl : ResponseFormat::csv;
        if (format != "csv" && format != "jsonl")
            throw std::runtime_error("unknown --format '" + format + "'");
        return load_responses(data_path, fmt);
    }
};

std::vector<double> parse_alpha(const std::string& text, int M) {
    std::vector<double> alpha;
    std::string item;
    std::istringstream ss(text);
    while (std::getline(ss, item, ',')) alpha.push_back(std::stod(item));
    if (alpha.size() == 1) alpha.assign(M, alpha[0]);
    if (static_cast<int>(alpha.size()) != M)
        throw std::runtime_error("--alpha needs 1 or M comma-separated values");
    return alpha;
}

ClusterModel cluster_phi(const Matrix& phi_hat, int fixed_c, int c_max, int folds,
                         std::uint64_t seed, ElbowReport* report_out) {
    PreferencePosterior post{phi_hat};
    const int I = phi_hat.rows();
    if (fixed_c > 0) {
        if (report_out) *report_out = {};
        return kmeans(post, fixed_c, derive_seed(seed, "cli/cluster"));
    }
    int top = std::min(c_max, I);
    auto report = elbow_select(post, top, std::min(folds, std::max(2, I)), seed);
    auto model = kmeans(post, report.selected, derive_seed(seed, "cli/cluster"));
    if (report_out) *report_out = std::move(report);
    return model;
}

TruthEstimate sdr_truth_estimate(const Checkpoint& ckpt, const ClusterModel& model,
                                 ClusterStrategy strategy) {
    auto truth = cluster_truth(model, ckpt.params);
    int c = select_cluster(model, ckpt.params, strategy);
    TruthEstimate est;
    est.posterior = truth.dist[c];
    est.argmax = truth.argmax[c];
    return est;
}

ClusterStrategy parse_strategy(const std::string& name) {
    if (name == "largest_group") return ClusterStrategy::largest_group;
    if (name == "highest_expertise") return ClusterStrategy::highest_expertise;
    throw std::runtime_error("unknown --strategy '" + name + "'");
}

// Option-index prediction for a (worker, question) pair under a fitted
// checkpoint; ties go to the lowest option index.
WorkerPredictor worker_predictor(const Checkpoint& ckpt, const ResponseMatrix& data) {
    const int K = data.option_count();
    if (ckpt.model == "sdr") {
        return [&ckpt](int i, int j) {
            auto probs = predict_response(ckpt.params, {ckpt.phi_hat}, i, j);
            return argmax_lowest_tie(probs);
        };
    }
    if (ckpt.model == "glad") {
        return [&ckpt, K](int i, int j) {
            double f = link_correct_prob(CorrectnessLink::damp, ckpt.glad.e[i], ckpt.glad.d[j]);
            std::vector<double> probs(K, 0.0);
            for (int k = 0; k < K; ++k) {
                double q = ckpt.truth.posterior(j, k);
                for (int r = 0; r < K; ++r)
                    probs[r] += q * (r == k ? f : (1.0 - f) / (K - 1));
            }
            return argmax_lowest_tie(probs);
        };
    }
    if (ckpt.model == "ds") {
        return [&ckpt, K](int i, int j) {
            std::vector<double> probs(K, 0.0);
            for (int k = 0; k < K; ++k) {
                double q = ckpt.truth.posterior(j, k);
                for (int r = 0; r < K; ++r) probs[r] += q * ckpt.ds.confusion[i](k, r);
            }
            return argmax_lowest_tie(probs);
        };
    }
    throw std::runtime_error("model '" + ckpt.model + "' has no per-worker response model");
}

void write_json_file(const json& doc, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quality control for crowdsourced categorical answers"};
    app.require_subcommand(1);

    // ---- simulate ----------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset");
    ConfigOverlay sim_cfg;
    sim_cfg.attach(sim);
    std::string sim_out, sim_generator = "sdr", sim_alpha = "1";
    std::uint64_t sim_seed = 1;
    int sim_i = 100, sim_j = 200, sim_k = 2, sim_m = 2, sim_rpq = 5;
    double sim_sep = 4.0, sim_gamma = 1.0;
    double sim_mu_e = 1.0, sim_s2_e = 1.0, sim_mu_d = 0.0, sim_s2_d = 1.0, sim_s2_u = 1.0,
           sim_s2_v = 1.0;
    auto* sim_out_o = sim->add_option("--out", sim_out, "output directory")->required();
    auto* sim_gen_o = sim->add_option("--generator", sim_generator, "sdr or glad");
    auto* sim_i_o = sim->add_option("--i", sim_i, "workers");
    auto* sim_j_o = sim->add_option("--j", sim_j, "questions");
    auto* sim_k_o = sim->add_option("--k", sim_k, "options");
    auto* sim_m_o = sim->add_option("--m", sim_m, "latent preferences");
    auto* sim_rpq_o = sim->add_option("--rpq", sim_rpq, "responses per question");
    auto* sim_sep_o = sim->add_option("--group-separation", sim_sep, "phi sharpening");
    auto* sim_alpha_o = sim->add_option("--alpha", sim_alpha, "Dirichlet alpha (scalar or list)");
    auto* sim_gamma_o = sim->add_option("--gamma", sim_gamma, "glad class prior concentration");
    auto* sim_mu_e_o = sim->add_option("--mu-e", sim_mu_e, "");
    auto* sim_s2_e_o = sim->add_option("--sigma2-e", sim_s2_e, "");
    auto* sim_mu_d_o = sim->add_option("--mu-d", sim_mu_d, "");
    auto* sim_s2_d_o = sim->add_option("--sigma2-d", sim_s2_d, "");
    auto* sim_s2_u_o = sim->add_option("--sigma2-u", sim_s2_u, "");
    auto* sim_s2_v_o = sim->add_option("--sigma2-v", sim_s2_v, "");
    auto* sim_seed_o = sim->add_option("--seed", sim_seed, "");

    // ---- fit ---------------------------------------------------------
    auto* fit = app.add_subcommand("fit", "fit a model and write a checkpoint");
    ConfigOverlay fit_cfg;
    fit_cfg.attach(fit);
    DatasetArgs fit_data;
    fit_data.attach(fit);
    std::string fit_model = "sdr", fit_out, fit_alpha = "1";
    std::uint64_t fit_seed = 1;
    int fit_m = 1, fit_outer = 50, fit_burn = 20;
    double fit_mu_e = 1.0, fit_s2_e = 1.0, fit_mu_d = 0.0, fit_s2_d = 1.0, fit_s2_u = 1.0,
           fit_s2_v = 1.0, fit_gamma = 1.0, fit_smoothing = 0.01;
    auto* fit_model_o = fit->add_option("--model", fit_model, "sdr, mv, glad or ds");
    auto* fit_out_o = fit->add_option("--out", fit_out, "output directory")->required();
    auto* fit_m_o = fit->add_option("--m", fit_m, "latent preferences");
    auto* fit_alpha_o = fit->add_option("--alpha", fit_alpha, "Dirichlet alpha (scalar or list)");
    auto* fit_mu_e_o = fit->add_option("--mu-e", fit_mu_e, "");
    auto* fit_s2_e_o = fit->add_option("--sigma2-e", fit_s2_e, "");
    auto* fit_mu_d_o = fit->add_option("--mu-d", fit_mu_d, "");
    auto* fit_s2_d_o = fit->add_option("--sigma2-d", fit_s2_d, "");
    auto* fit_s2_u_o = fit->add_option("--sigma2-u", fit_s2_u, "");
    auto* fit_s2_v_o = fit->add_option("--sigma2-v", fit_s2_v, "");
    auto* fit_outer_o = fit->add_option("--outer-iters", fit_outer, "");
    auto* fit_burn_o = fit->add_option("--burn-in", fit_burn, "");
    auto* fit_gamma_o = fit->add_option("--gamma", fit_gamma, "glad theta smoothing");
    auto* fit_smooth_o = fit->add_option("--smoothing", fit_smoothing, "ds Laplace smoothing");
    auto* fit_seed_o = fit->add_option("--seed", fit_seed, "");

    // ---- predict-truth -----------------------------------------------
    auto* ptruth = app.add_subcommand("predict-truth", "export per-question answer estimates");
    ConfigOverlay pt_cfg;
    pt_cfg.attach(ptruth);
    DatasetArgs pt_data;
    pt_data.attach(ptruth);
    std::string pt_ckpt, pt_out, pt_strategy = "largest_group";
    int pt_c = 0, pt_c_max = 8, pt_folds = 10;
    std::uint64_t pt_seed = 0;
    bool pt_seed_given = false;
    auto* pt_ckpt_o = ptruth->add_option("--checkpoint", pt_ckpt, "")->required();
    auto* pt_out_o = ptruth->add_option("--out", pt_out, "output directory")->required();
    auto* pt_strategy_o = ptruth->add_option("--strategy", pt_strategy,
                                             "largest_group or highest_expertise");
    auto* pt_c_o = ptruth->add_option("--c", pt_c, "fixed cluster count (0 = elbow)");
    auto* pt_cmax_o = ptruth->add_option("--c-max", pt_c_max, "");
    auto* pt_folds_o = ptruth->add_option("--folds", pt_folds, "");
    auto* pt_seed_o = ptruth->add_option("--seed", pt_seed, "clustering seed (default: fit seed)");

    // ---- predict-worker ----------------------------------------------
    auto* pworker = app.add_subcommand("predict-worker", "predict held-out worker responses");
    ConfigOverlay pw_cfg;
    pw_cfg.attach(pworker);
    DatasetArgs pw_data;
    pw_data.attach(pworker);
    std::string pw_ckpt, pw_out;
    std::uint64_t pw_seed = 1;
    auto* pw_ckpt_o = pworker->add_option("--checkpoint", pw_ckpt, "")->required();
    auto* pw_out_o = pworker->add_option("--out", pw_out, "output directory")->required();
    auto* pw_seed_o = pworker->add_option("--seed", pw_seed, "holdout split seed");

    // ---- subjectivity ------------------------------------------------
    auto* subj = app.add_subcommand("subjectivity", "rank questions by difficulty and subjectivity");
    ConfigOverlay sj_cfg;
    sj_cfg.attach(subj);
    DatasetArgs sj_data;
    sj_data.attach(subj);
    std::string sj_ckpt, sj_out;
    long long sj_t = 50000;
    int sj_c = 0, sj_c_max = 8, sj_folds = 10;
    std::uint64_t sj_seed = 0;
    auto* sj_ckpt_o = subj->add_option("--checkpoint", sj_ckpt, "")->required();
    auto* sj_out_o = subj->add_option("--out", sj_out, "output directory")->required();
    auto* sj_t_o = subj->add_option("--t-samples", sj_t, "Monte Carlo iterations");
    auto* sj_c_o = subj->add_option("--c", sj_c, "fixed cluster count (0 = elbow)");
    auto* sj_cmax_o = subj->add_option("--c-max", sj_c_max, "");
    auto* sj_folds_o = subj->add_option("--folds", sj_folds, "");
    auto* sj_seed_o = subj->add_option("--seed", sj_seed, "sampling seed (default: fit seed)");

    // ---- validate ----------------------------------------------------
    auto* val = app.add_subcommand("validate", "grid search by held-out response prediction");
    ConfigOverlay val_cfg;
    val_cfg.attach(val);
    DatasetArgs val_data;
    val_data.attach(val);
    std::string val_grid, val_out;
    int val_reps = 0;
    std::uint64_t val_seed = 1;
    bool val_exact = false;
    int val_outer = 50, val_burn = 20;
    auto* val_grid_o = val->add_option("--grid", val_grid, "JSON grid file")->required();
    auto* val_out_o = val->add_option("--out", val_out, "output directory")->required();
    auto* val_reps_o = val->add_option("--repetitions", val_reps, "overrides the grid file");
    auto* val_outer_o = val->add_option("--outer-iters", val_outer, "");
    auto* val_burn_o = val->add_option("--burn-in", val_burn, "");
    auto* val_seed_o = val->add_option("--seed", val_seed, "");
    val->add_flag("--exact-match", val_exact, "score nominal options by exact match");

    // ---- evaluate ----------------------------------------------------
    auto* eval = app.add_subcommand("evaluate", "score a checkpoint against gold labels");
    ConfigOverlay ev_cfg;
    ev_cfg.attach(eval);
    DatasetArgs ev_data;
    ev_data.attach(eval);
    std::string ev_ckpt, ev_gold, ev_out, ev_strategy = "largest_group";
    int ev_c = 0, ev_c_max = 8, ev_folds = 10;
    std::uint64_t ev_seed = 1;
    bool ev_worker = false;
    auto* ev_ckpt_o = eval->add_option("--checkpoint", ev_ckpt, "")->required();
    auto* ev_gold_o = eval->add_option("--gold", ev_gold, "gold label CSV")->required();
    auto* ev_out_o = eval->add_option("--out", ev_out, "output directory")->required();
    auto* ev_strategy_o = eval->add_option("--strategy", ev_strategy, "");
    auto* ev_c_o = eval->add_option("--c", ev_c, "");
    auto* ev_cmax_o = eval->add_option("--c-max", ev_c_max, "");
    auto* ev_folds_o = eval->add_option("--folds", ev_folds, "");
    auto* ev_seed_o = eval->add_option("--seed", ev_seed, "holdout split seed");
    eval->add_flag("--worker-eval", ev_worker, "also score held-out response prediction");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            sim_cfg.load();
            sim_cfg.apply(sim_gen_o, "generator", sim_generator);
            sim_cfg.apply(sim_i_o, "i", sim_i);
            sim_cfg.apply(sim_j_o, "j", sim_j);
            sim_cfg.apply(sim_k_o, "k", sim_k);
            sim_cfg.apply(sim_m_o, "m", sim_m);
            sim_cfg.apply(sim_rpq_o, "rpq", sim_rpq);
            sim_cfg.apply(sim_sep_o, "group-separation", sim_sep);
            sim_cfg.apply(sim_alpha_o, "alpha", sim_alpha);
            sim_cfg.apply(sim_gamma_o, "gamma", sim_gamma);
            sim_cfg.apply(sim_mu_e_o, "mu-e", sim_mu_e);
            sim_cfg.apply(sim_s2_e_o, "sigma2-e", sim_s2_e);
            sim_cfg.apply(sim_mu_d_o, "mu-d", sim_mu_d);
            sim_cfg.apply(sim_s2_d_o, "sigma2-d", sim_s2_d);
            sim_cfg.apply(sim_s2_u_o, "sigma2-u", sim_s2_u);
            sim_cfg.apply(sim_s2_v_o, "sigma2-v", sim_s2_v);
            sim_cfg.apply(sim_seed_o, "seed", sim_seed);
            sim_cfg.apply(sim_out_o, "out", sim_out);
            fs::create_directories(sim_out);
            if (sim_generator == "sdr") {
                SynthSpec spec;
                spec.I = sim_i;
                spec.J = sim_j;
                spec.K = sim_k;
                spec.M = sim_m;
                spec.hp = SdrHyperParams::with_m(sim_m);
                spec.hp.alpha = parse_alpha(sim_alpha, sim_m);
                spec.hp.mu_e = sim_mu_e;
                spec.hp.sigma2_e = sim_s2_e;
                spec.hp.mu_d = sim_mu_d;
                spec.hp.sigma2_d = sim_s2_d;
                spec.hp.sigma2_u = sim_s2_u;
                spec.hp.sigma2_v = sim_s2_v;
                spec.responses_per_question = sim_rpq;
                spec.group_separation = sim_sep;
                spec.seed = sim_seed;
                auto synth = generate_sdr(spec);
                save_responses(synth.data, fs::path(sim_out) / "dataset.csv", ResponseFormat::csv);
                save_gold(synth.truth.gold, synth.data, fs::path(sim_out) / "gold.csv");
                write_synth_truth_json(synth.truth, synth.data, fs::path(sim_out) / "truth.json");
            } else if (sim_generator == "glad") {
                GladSynthPriors priors;
                priors.mu_e = sim_mu_e;
                priors.sigma2_e = sim_s2_e;
                priors.mu_d = sim_mu_d;
                priors.sigma2_d = sim_s2_d;
                priors.gamma = sim_gamma;
                auto synth = generate_glad(sim_i, sim_j, sim_k, priors, sim_seed, sim_rpq);
                save_responses(synth.data, fs::path(sim_out) / "dataset.csv", ResponseFormat::csv);
                save_gold(synth.gold, synth.data, fs::path(sim_out) / "gold.csv");
            } else {
                throw std::runtime_error("unknown --generator '" + sim_generator + "'");
            }
            return 0;
        }

        if (fit->parsed()) {
            fit_cfg.load();
            fit_cfg.apply(fit_data.data_opt, "data", fit_data.data_path);
            fit_cfg.apply(fit_data.format_opt, "format", fit_data.format);
            fit_cfg.apply(fit_model_o, "model", fit_model);
            fit_cfg.apply(fit_m_o, "m", fit_m);
            fit_cfg.apply(fit_alpha_o, "alpha", fit_alpha);
            fit_cfg.apply(fit_mu_e_o, "mu-e", fit_mu_e);
            fit_cfg.apply(fit_s2_e_o, "sigma2-e", fit_s2_e);
            fit_cfg.apply(fit_mu_d_o, "mu-d", fit_mu_d);
            fit_cfg.apply(fit_s2_d_o, "sigma2-d", fit_s2_d);
            fit_cfg.apply(fit_s2_u_o, "sigma2-u", fit_s2_u);
            fit_cfg.apply(fit_s2_v_o, "sigma2-v", fit_s2_v);
            fit_cfg.apply(fit_outer_o, "outer-iters", fit_outer);
            fit_cfg.apply(fit_burn_o, "burn-in", fit_burn);
            fit_cfg.apply(fit_gamma_o, "gamma", fit_gamma);
            fit_cfg.apply(fit_smooth_o, "smoothing", fit_smoothing);
            fit_cfg.apply(fit_seed_o, "seed", fit_seed);
            fit_cfg.apply(fit_out_o, "out", fit_out);

            auto data = fit_data.load();
            fs::create_directories(fit_out);
            Checkpoint ckpt;
            ckpt.model = fit_model;
            ckpt.seed = fit_seed;
            ckpt.dataset_checksum = data.checksum();
            json trace;

            if (fit_model == "sdr") {
                ckpt.hp = SdrHyperParams::with_m(fit_m);
                ckpt.hp.alpha = parse_alpha(fit_alpha, fit_m);
                ckpt.hp.mu_e = fit_mu_e;
                ckpt.hp.sigma2_e = fit_s2_e;
                ckpt.hp.mu_d = fit_mu_d;
                ckpt.hp.sigma2_d = fit_s2_d;
                ckpt.hp.sigma2_u = fit_s2_u;
                ckpt.hp.sigma2_v = fit_s2_v;
                FitSchedule schedule;
                schedule.outer_iterations = fit_outer;
                schedule.burn_in = fit_burn;
                auto result = fit_sdr(data, ckpt.hp, schedule, fit_seed);
                ckpt.params = result.params;
                ckpt.phi_hat = result.posterior.phi_hat;
                json rounds = json::array();
                for (const auto& r : result.trace)
                    rounds.push_back({{"q_before", r.q_before}, {"q_after", r.q_after}});
                trace = {{"model", "sdr"}, {"rounds", rounds}};
            } else if (fit_model == "mv") {
                ckpt.truth = majority_vote(data);
                trace = {{"model", "mv"}};
            } else if (fit_model == "glad") {
                GladPriors priors;
                priors.mu_e = fit_mu_e;
                priors.sigma2_e = fit_s2_e;
                priors.mu_d = fit_mu_d;
                priors.sigma2_d = fit_s2_d;
                priors.gamma = fit_gamma;
                auto result = glad_fit(data, priors, fit_seed);
                ckpt.glad = result.params;
                ckpt.truth = result.truth;
                trace = {{"model", "glad"}, {"log_likelihood", result.trace}};
            } else if (fit_model == "ds") {
                auto result = ds_fit(data, fit_smoothing, fit_seed);
                ckpt.ds = result.params;
                ckpt.truth = result.truth;
                trace = {{"model", "ds"}, {"log_likelihood", result.trace}};
            } else {
                throw std::runtime_error("unknown --model '" + fit_model + "'");
            }

            save_checkpoint(ckpt, fs::path(fit_out) / "checkpoint.json");
            write_json_file(trace, fs::path(fit_out) / "trace.json");
            return 0;
        }

        if (ptruth->parsed()) {
            pt_cfg.load();
            pt_cfg.apply(pt_data.data_opt, "data", pt_data.data_path);
            pt_cfg.apply(pt_data.format_opt, "format", pt_data.format);
            pt_cfg.apply(pt_ckpt_o, "checkpoint", pt_ckpt);
            pt_cfg.apply(pt_strategy_o, "strategy", pt_strategy);
            pt_cfg.apply(pt_c_o, "c", pt_c);
            pt_cfg.apply(pt_cmax_o, "c-max", pt_c_max);
            pt_cfg.apply(pt_folds_o, "folds", pt_folds);
            pt_cfg.apply(pt_out_o, "out", pt_out);
            pt_seed_given = pt_seed_o->count() > 0;
            pt_cfg.apply(pt_seed_o, "seed", pt_seed);

            auto data = pt_data.load();
            auto ckpt = load_checkpoint(pt_ckpt, data);
            fs::create_directories(pt_out);
            TruthEstimate est;
            if (ckpt.model == "sdr") {
                std::uint64_t seed = pt_seed_given ? pt_seed : ckpt.seed;
                ElbowReport report;
                auto model = cluster_phi(ckpt.phi_hat, pt_c, pt_c_max, pt_folds, seed, &report);
                est = sdr_truth_estimate(ckpt, model, parse_strategy(pt_strategy));
                export_clusters_csv(model, data, fs::path(pt_out) / "clusters.csv");
                if (pt_c <= 0) export_elbow_json(report, fs::path(pt_out) / "elbow.json");
            } else {
                est = ckpt.truth;
            }
            export_truth_csv(est, data, fs::path(pt_out) / "truth.csv");
            return 0;
        }

        if (pworker->parsed()) {
            pw_cfg.load();
            pw_cfg.apply(pw_data.data_opt, "data", pw_data.data_path);
            pw_cfg.apply(pw_data.format_opt, "format", pw_data.format);
            pw_cfg.apply(pw_ckpt_o, "checkpoint", pw_ckpt);
            pw_cfg.apply(pw_seed_o, "seed", pw_seed);
            pw_cfg.apply(pw_out_o, "out", pw_out);

            auto data = pw_data.load();
            auto ckpt = load_checkpoint(pw_ckpt, data);
            auto predictor = worker_predictor(ckpt, data);
            auto split = split_holdout(data, pw_seed);
            fs::create_directories(pw_out);
            std::ofstream out(fs::path(pw_out) / "worker_predictions.csv");
            out << "worker,question,actual,predicted\n";
            for (const auto& rec : split.heldout) {
                int i = data.worker_index(rec.worker);
                int j = data.question_index(rec.question);
                out << rec.worker << ',' << rec.question << ',' << rec.option << ','
                    << data.options[predictor(i, j)] << '\n';
            }
            return 0;
        }

        if (subj->parsed()) {
            sj_cfg.load();
            sj_cfg.apply(sj_data.data_opt, "data", sj_data.data_path);
            sj_cfg.apply(sj_data.format_opt, "format", sj_data.format);
            sj_cfg.apply(sj_ckpt_o, "checkpoint", sj_ckpt);
            sj_cfg.apply(sj_t_o, "t-samples", sj_t);
            sj_cfg.apply(sj_c_o, "c", sj_c);
            sj_cfg.apply(sj_cmax_o, "c-max", sj_c_max);
            sj_cfg.apply(sj_folds_o, "folds", sj_folds);
            sj_cfg.apply(sj_out_o, "out", sj_out);
            bool seed_given = sj_seed_o->count() > 0;
            sj_cfg.apply(sj_seed_o, "seed", sj_seed);

            auto data = sj_data.load();
            auto ckpt = load_checkpoint(sj_ckpt, data);
            if (ckpt.model != "sdr")
                throw std::runtime_error("subjectivity needs an sdr checkpoint");
            std::uint64_t seed = seed_given ? sj_seed : ckpt.seed;
            auto model = cluster_phi(ckpt.phi_hat, sj_c, sj_c_max, sj_folds, seed, nullptr);
            std::vector<SubjectivityEstimate> estimates(data.question_count());
            for (int j = 0; j < data.question_count(); ++j)
                estimates[j] = mc_subjectivity(j, model, ckpt.params, sj_t, seed);
            auto rankings = rank_questions(ckpt.params, estimates, data.questions);
            fs::create_directories(sj_out);
            export_rankings_csv(ckpt.params, estimates, rankings, data,
                                fs::path(sj_out) / "rankings.csv");
            return 0;
        }

        if (val->parsed()) {
            val_cfg.load();
            val_cfg.apply(val_data.data_opt, "data", val_data.data_path);
            val_cfg.apply(val_data.format_opt, "format", val_data.format);
            val_cfg.apply(val_grid_o, "grid", val_grid);
            val_cfg.apply(val_reps_o, "repetitions", val_reps);
            val_cfg.apply(val_outer_o, "outer-iters", val_outer);
            val_cfg.apply(val_burn_o, "burn-in", val_burn);
            val_cfg.apply(val_seed_o, "seed", val_seed);
            val_cfg.apply(val_out_o, "out", val_out);

            auto data = val_data.load();
            std::ifstream grid_in(val_grid);
            if (!grid_in) throw std::runtime_error("grid file not found: " + val_grid);
            json grid_doc;
            grid_in >> grid_doc;
            GridSpec grid;
            if (grid_doc.contains("m")) grid.M = grid_doc["m"].get<std::vector<int>>();
            auto lists = {std::pair{"alpha_scale", &grid.alpha_scale},
                          std::pair{"mu_e", &grid.mu_e},
                          std::pair{"sigma2_e", &grid.sigma2_e},
                          std::pair{"mu_d", &grid.mu_d},
                          std::pair{"sigma2_d", &grid.sigma2_d},
                          std::pair{"sigma2_u", &grid.sigma2_u},
                          std::pair{"sigma2_v", &grid.sigma2_v}};
            for (auto [key, dst] : lists)
                if (grid_doc.contains(key)) *dst = grid_doc[key].get<std::vector<double>>();
            if (grid_doc.contains("repetitions")) grid.repetitions = grid_doc["repetitions"].get<int>();
            if (val_reps > 0) grid.repetitions = val_reps;

            FitSchedule schedule;
            schedule.outer_iterations = val_outer;
            schedule.burn_in = val_burn;
            ModelFactory factory = [&schedule](const ResponseMatrix& train, const GridConfig& cfg,
                                               std::uint64_t fit_seed) -> WorkerPredictor {
                SdrHyperParams hp = SdrHyperParams::with_m(cfg.M);
                for (auto& a : hp.alpha) a *= cfg.alpha_scale;
                hp.mu_e = cfg.mu_e;
                hp.sigma2_e = cfg.sigma2_e;
                hp.mu_d = cfg.mu_d;
                hp.sigma2_d = cfg.sigma2_d;
                hp.sigma2_u = cfg.sigma2_u;
                hp.sigma2_v = cfg.sigma2_v;
                auto fitted = fit_sdr(train, hp, schedule, fit_seed);
                auto params = std::make_shared<SdrParams>(std::move(fitted.params));
                auto phi = std::make_shared<Matrix>(std::move(fitted.posterior.phi_hat));
                return [params, phi](int i, int j) {
                    auto probs = predict_response(*params, {*phi}, i, j);
                    return argmax_lowest_tie(probs);
                };
            };

            auto result = holdout_validate(data, factory, grid, val_seed, val_exact);
            fs::create_directories(val_out);
            export_validation_csv(result, fs::path(val_out) / "table.csv");
            export_best_config_json(result, fs::path(val_out) / "best.json");
            return 0;
        }

        if (eval->parsed()) {
            ev_cfg.load();
            ev_cfg.apply(ev_data.data_opt, "data", ev_data.data_path);
            ev_cfg.apply(ev_data.format_opt, "format", ev_data.format);
            ev_cfg.apply(ev_ckpt_o, "checkpoint", ev_ckpt);
            ev_cfg.apply(ev_gold_o, "gold", ev_gold);
            ev_cfg.apply(ev_strategy_o, "strategy", ev_strategy);
            ev_cfg.apply(ev_c_o, "c", ev_c);
            ev_cfg.apply(ev_cmax_o, "c-max", ev_c_max);
            ev_cfg.apply(ev_folds_o, "folds", ev_folds);
            ev_cfg.apply(ev_seed_o, "seed", ev_seed);
            ev_cfg.apply(ev_out_o, "out", ev_out);

            auto data = ev_data.load();
            auto ckpt = load_checkpoint(ev_ckpt, data);
            auto gold = load_gold(ev_gold, data);

            TruthEstimate est;
            if (ckpt.model == "sdr") {
                auto model = cluster_phi(ckpt.phi_hat, ev_c, ev_c_max, ev_folds, ckpt.seed, nullptr);
                est = sdr_truth_estimate(ckpt, model, parse_strategy(ev_strategy));
            } else {
                est = ckpt.truth;
            }

            json doc;
            std::vector<bool> hits;
            doc["model"] = ckpt.model;
            doc["truth_accuracy"] = truth_accuracy(est.argmax, gold, &hits);
            doc["per_question_hits"] = hits;
            if (ev_worker) {
                auto predictor = worker_predictor(ckpt, data);
                auto split = split_holdout(data, ev_seed);
                std::vector<int> predicted, actual;
                for (const auto& rec : split.heldout) {
                    predicted.push_back(
                        predictor(data.worker_index(rec.worker), data.question_index(rec.question)));
                    actual.push_back(data.option_index(rec.option));
                }
                doc["worker_accuracy_1mae"] = worker_accuracy_1mae(predicted, actual);
            }
            fs::create_directories(ev_out);
            write_json_file(doc, fs::path(ev_out) / "metrics.json");
            return 0;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
