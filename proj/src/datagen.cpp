#include "brifca/datagen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

namespace brifca {

namespace {

ParamVector bernoulli_direction(int d, double norm, RngStream& rng) {
    ParamVector v(d);
    while (true) {
        for (int h = 0; h < d; ++h) v[h] = static_cast<double>(rng.bernoulli_half());
        double len = v.norm();
        if (len > 0.0) return v * (norm / len);  // all-zero draws are redrawn
    }
}

}  // namespace

GroundTruth generate_ground_truth(int k, int d, RngStream& rng) {
    if (k < 1 || d < 1) throw InvalidInput("generate_ground_truth: k and d must be >= 1");
    GroundTruth truth;
    truth.params.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) truth.params.push_back(bernoulli_direction(d, 1.0, rng));
    truth.delta = truth.min_separation();
    return truth;
}

std::vector<WorkerSpec> generate_population(const ExperimentConfig& cfg, GroundTruth& truth) {
    cfg.validate();
    if (truth.k() != cfg.k) throw InvalidInput("generate_population: truth has wrong cluster count");
    const int byz = cfg.byzantine_count();
    const int honest = cfg.m - byz;
    const LossModel model{cfg.model, cfg.d};

    truth.cluster_sizes.assign(static_cast<std::size_t>(cfg.k), 0);
    std::vector<WorkerSpec> workers(static_cast<std::size_t>(cfg.m));
    for (int i = 0; i < cfg.m; ++i) {
        WorkerSpec& w = workers[static_cast<std::size_t>(i)];
        w.index = i;
        RngStream data_rng(cfg.seed, {stream_label::worker_data, static_cast<std::uint64_t>(i)});
        if (i < honest) {
            w.byzantine = false;
            w.cluster_id = i % cfg.k;
            ++truth.cluster_sizes[static_cast<std::size_t>(w.cluster_id)];
            w.data = draw_dataset(model, truth.params[static_cast<std::size_t>(w.cluster_id)],
                                  cfg.sigma2, cfg.n_per_machine[static_cast<std::size_t>(i)],
                                  data_rng);
        } else {
            w.byzantine = true;
            w.strategy = AttackStrategy{cfg.attack, cfg.attack_magnitude};
            RngStream param_rng(cfg.seed, {stream_label::byz_param, static_cast<std::uint64_t>(i)});
            w.byz_param = bernoulli_direction(cfg.d, 3.0, param_rng);
            w.data = draw_dataset(model, *w.byz_param, cfg.sigma2,
                                  cfg.n_per_machine[static_cast<std::size_t>(i)], data_rng);
        }
    }
    return workers;
}

namespace {

void write_double(std::ostream& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.write(buf, res.ptr - buf);
}

}  // namespace

void dump_workers(const std::string& dir, const std::vector<WorkerSpec>& workers,
                  const LossModel& model) {
    std::filesystem::create_directories(dir);
    for (const auto& w : workers) {
        std::ofstream out(std::filesystem::path(dir) /
                          ("worker_" + std::to_string(w.index) + ".txt"));
        if (!out) throw std::runtime_error("dump_workers: cannot write under " + dir);
        out << "# worker " << w.index << " role=" << (w.byzantine ? "byzantine" : "honest")
            << " cluster=" << w.cluster_id << " attack=" << to_string(w.strategy.kind)
            << " model=" << to_string(model.family) << " d=" << model.dim << " n=" << w.data.n();
        if (w.byz_param) {
            out << " byz_param=";
            for (int h = 0; h < w.byz_param->size(); ++h) {
                if (h) out << ',';
                write_double(out, (*w.byz_param)[h]);
            }
        }
        out << '\n';
        for (int i = 0; i < w.data.n(); ++i) {
            for (int h = 0; h < w.data.dim(); ++h) {
                if (h) out << ' ';
                write_double(out, w.data.points(i, h));
            }
            if (w.data.has_responses()) {
                out << ' ';
                write_double(out, w.data.responses[i]);
            }
            out << '\n';
        }
    }
}

std::vector<WorkerSpec> load_workers(const std::string& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.starts_with("worker_") && name.ends_with(".txt")) files.push_back(entry.path());
    }
    std::vector<WorkerSpec> workers;
    workers.reserve(files.size());
    for (const auto& path : files) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("load_workers: cannot open " + path.string());
        std::string header;
        std::getline(in, header);
        WorkerSpec w;
        std::string family;
        int d = 0, n = 0;
        std::string byz_param_text;
        {
            std::istringstream hs(header);
            std::string token;
            hs >> token;  // '#'
            hs >> token;  // 'worker'
            hs >> w.index;
            while (hs >> token) {
                auto eq = token.find('=');
                if (eq == std::string::npos) continue;
                std::string key = token.substr(0, eq), value = token.substr(eq + 1);
                if (key == "role") w.byzantine = (value == "byzantine");
                else if (key == "cluster") w.cluster_id = std::stoi(value);
                else if (key == "model") family = value;
                else if (key == "d") d = std::stoi(value);
                else if (key == "n") n = std::stoi(value);
                else if (key == "byz_param") byz_param_text = value;
                else if (key == "attack") {
                    if (value == "scaled_eval") w.strategy.kind = AttackKind::scaled_eval;
                    else if (value == "arbitrary_vector") w.strategy.kind = AttackKind::arbitrary_vector;
                    else if (value == "sign_flip") w.strategy.kind = AttackKind::sign_flip;
                    else if (value == "omniscient_target_smallest")
                        w.strategy.kind = AttackKind::omniscient_target_smallest;
                }
            }
        }
        if (d <= 0 || n <= 0) throw std::runtime_error("load_workers: bad header in " + path.string());
        bool linreg = family == "linreg_squared";
        if (!byz_param_text.empty()) {
            std::vector<double> coords;
            std::istringstream ps(byz_param_text);
            std::string cell;
            while (std::getline(ps, cell, ',')) coords.push_back(std::stod(cell));
            w.byz_param = Eigen::Map<ParamVector>(coords.data(), static_cast<Eigen::Index>(coords.size()));
        }
        w.data.points.resize(n, d);
        if (linreg) w.data.responses.resize(n);
        for (int i = 0; i < n; ++i) {
            for (int h = 0; h < d; ++h) in >> w.data.points(i, h);
            if (linreg) in >> w.data.responses[i];
        }
        if (!in) throw std::runtime_error("load_workers: truncated samples in " + path.string());
        workers.push_back(std::move(w));
    }
    std::sort(workers.begin(), workers.end(),
              [](const WorkerSpec& a, const WorkerSpec& b) { return a.index < b.index; });
    return workers;
}

}  // namespace brifca
