#include "crowdtruth/checkpoint.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace crowdtruth {

namespace {

using nlohmann::json;

std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
    return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
    std::uint64_t v = 0;
    if (std::sscanf(s.c_str(), "%" SCNx64, &v) != 1)
        throw std::runtime_error("checkpoint: bad checksum field '" + s + "'");
    return v;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r)
        rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
    return rows;
}

Matrix matrix_from_json(const json& rows) {
    if (rows.empty()) return {};
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (int r = 0; r < m.rows(); ++r) {
        const auto& row = rows[r];
        if (static_cast<int>(row.size()) != m.cols())
            throw std::runtime_error("checkpoint: ragged matrix rows");
        for (int c = 0; c < m.cols(); ++c) m(r, c) = row[c].get<double>();
    }
    return m;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    json doc;
    doc["version"] = ckpt.version;
    doc["model"] = ckpt.model;
    doc["seed"] = ckpt.seed;
    doc["dataset_checksum"] = hex64(ckpt.dataset_checksum);

    if (ckpt.model == "sdr") {
        doc["hyperparams"] = {{"m", ckpt.hp.M},         {"alpha", ckpt.hp.alpha},
                              {"mu_e", ckpt.hp.mu_e},   {"sigma2_e", ckpt.hp.sigma2_e},
                              {"mu_d", ckpt.hp.mu_d},   {"sigma2_d", ckpt.hp.sigma2_d},
                              {"mu_u", ckpt.hp.mu_u},   {"sigma2_u", ckpt.hp.sigma2_u},
                              {"mu_v", ckpt.hp.mu_v},   {"sigma2_v", ckpt.hp.sigma2_v}};
        doc["params"] = {{"e", ckpt.params.e},
                         {"d", ckpt.params.d},
                         {"u", matrix_to_json(ckpt.params.u)},
                         {"v", matrix_to_json(ckpt.params.v)}};
        doc["phi_hat"] = matrix_to_json(ckpt.phi_hat);
    } else if (ckpt.model == "glad") {
        doc["glad"] = {{"e", ckpt.glad.e},
                       {"d", ckpt.glad.d},
                       {"theta", ckpt.glad.theta},
                       {"gamma", ckpt.glad.gamma}};
    } else if (ckpt.model == "ds") {
        json confusion = json::array();
        for (const auto& m : ckpt.ds.confusion) confusion.push_back(matrix_to_json(m));
        doc["ds"] = {{"confusion", confusion}, {"class_prior", ckpt.ds.class_prior}};
    } else if (ckpt.model != "mv") {
        throw std::invalid_argument("checkpoint: unknown model '" + ckpt.model + "'");
    }

    if (ckpt.model != "sdr") {
        doc["truth"] = {{"posterior", matrix_to_json(ckpt.truth.posterior)},
                        {"argmax", ckpt.truth.argmax}};
    }

    std::ofstream out(path);
    if (!out) throw std::runtime_error("checkpoint: cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const ResponseMatrix& data) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("checkpoint: cannot read " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("checkpoint: malformed JSON in " + path.string() + ": " + e.what());
    }

    Checkpoint ckpt;
    ckpt.version = doc.at("version").get<int>();
    if (ckpt.version != 1)
        throw std::runtime_error("checkpoint: unsupported version " + std::to_string(ckpt.version));
    ckpt.model = doc.at("model").get<std::string>();
    ckpt.seed = doc.at("seed").get<std::uint64_t>();
    ckpt.dataset_checksum = parse_hex64(doc.at("dataset_checksum").get<std::string>());
    if (ckpt.dataset_checksum != data.checksum())
        throw std::runtime_error(
            "checkpoint: dataset checksum mismatch (checkpoint was fitted on different data)");

    if (ckpt.model == "sdr") {
        const auto& hp = doc.at("hyperparams");
        ckpt.hp.M = hp.at("m").get<int>();
        ckpt.hp.alpha = hp.at("alpha").get<std::vector<double>>();
        ckpt.hp.mu_e = hp.at("mu_e").get<double>();
        ckpt.hp.sigma2_e = hp.at("sigma2_e").get<double>();
        ckpt.hp.mu_d = hp.at("mu_d").get<double>();
        ckpt.hp.sigma2_d = hp.at("sigma2_d").get<double>();
        ckpt.hp.mu_u = hp.at("mu_u").get<double>();
        ckpt.hp.sigma2_u = hp.at("sigma2_u").get<double>();
        ckpt.hp.mu_v = hp.at("mu_v").get<double>();
        ckpt.hp.sigma2_v = hp.at("sigma2_v").get<double>();
        const auto& params = doc.at("params");
        ckpt.params.e = params.at("e").get<std::vector<double>>();
        ckpt.params.d = params.at("d").get<std::vector<double>>();
        ckpt.params.u = matrix_from_json(params.at("u"));
        ckpt.params.v = matrix_from_json(params.at("v"));
        ckpt.phi_hat = matrix_from_json(doc.at("phi_hat"));
    } else if (ckpt.model == "glad") {
        const auto& glad = doc.at("glad");
        ckpt.glad.e = glad.at("e").get<std::vector<double>>();
        ckpt.glad.d = glad.at("d").get<std::vector<double>>();
        ckpt.glad.theta = glad.at("theta").get<std::vector<double>>();
        ckpt.glad.gamma = glad.at("gamma").get<double>();
    } else if (ckpt.model == "ds") {
        const auto& ds = doc.at("ds");
        for (const auto& m : ds.at("confusion")) ckpt.ds.confusion.push_back(matrix_from_json(m));
        ckpt.ds.class_prior = ds.at("class_prior").get<std::vector<double>>();
    } else if (ckpt.model != "mv") {
        throw std::runtime_error("checkpoint: unknown model '" + ckpt.model + "'");
    }

    if (ckpt.model != "sdr") {
        ckpt.truth.posterior = matrix_from_json(doc.at("truth").at("posterior"));
        ckpt.truth.argmax = doc.at("truth").at("argmax").get<std::vector<int>>();
    }
    return ckpt;
}

}  // namespace crowdtruth
