#include "omlab/repr/embeddings.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "omlab/core/distributions.hpp"
#include "omlab/core/error.hpp"

namespace omlab::repr {

std::vector<EmbeddingSample> encode_trajectories(const std::vector<envs::Trajectory>& trips,
                                                 const vae::TrajectoryEncoder& enc, Stream stream,
                                                 const CollectConfig& cfg, core::Rng& rng) {
    require(!trips.empty(), "embeddings: no trajectories");
    require(!cfg.timesteps.empty(), "embeddings: no timesteps requested");

    std::vector<EmbeddingSample> out;
    out.reserve(trips.size() * cfg.timesteps.size());
    for (std::size_t ep = 0; ep < trips.size(); ++ep) {
        const envs::Trajectory& tr = trips[ep];
        const auto posts = (stream == Stream::kOpponent) ? vae::encode_opponent(enc, tr)
                                                         : vae::encode_self(enc, tr);
        for (int t : cfg.timesteps) {
            require(t >= 1 && t <= tr.length(), "embeddings: timestep outside the episode");
            EmbeddingSample s;
            s.z = cfg.posterior_samples
                      ? core::reparam_sample(posts[t - 1], rng).values()
                      : posts[t - 1].mean.values();
            s.opponent_id = tr.opponent_id;
            s.t = t;
            s.episode = static_cast<int>(ep);
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::vector<EmbeddingSample> collect_embeddings(const envs::EnvFactory& make_env,
                                                const envs::Pool& pool,
                                                const vae::TrajectoryEncoder& enc, Stream stream,
                                                const CollectConfig& cfg,
                                                const envs::PolicyFn& policy, core::Rng& rng) {
    require(cfg.episodes_per_opponent > 0, "embeddings: need at least one episode");
    const auto trips =
        envs::record_trajectories(make_env, pool, cfg.episodes_per_opponent, policy, rng);
    return encode_trajectories(trips, enc, stream, cfg, rng);
}

void write_embeddings_csv(const std::string& path, const std::vector<EmbeddingSample>& samples) {
    require(!samples.empty(), "embeddings: nothing to write");
    const std::size_t width = samples[0].z.size();
    std::ofstream f(path);
    if (!f) throw DataError("embeddings: cannot open " + path + " for writing");
    f << "opponent_id,episode,t";
    for (std::size_t k = 0; k < width; ++k) f << ",z" << k;
    f << "\n";
    f.precision(17);
    for (const auto& s : samples) {
        require(s.z.size() == width, "embeddings: ragged latent widths");
        f << s.opponent_id << ',' << s.episode << ',' << s.t;
        for (double v : s.z) f << ',' << v;
        f << "\n";
    }
    if (!f.good()) throw DataError("embeddings: write to " + path + " failed");
}

std::vector<EmbeddingSample> read_embeddings_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("embeddings: cannot open " + path);
    std::string line;
    if (!std::getline(f, line)) throw DataError("embeddings: " + path + " is empty");

    std::size_t width = 0;
    {
        std::stringstream hdr(line);
        std::string col;
        std::vector<std::string> cols;
        while (std::getline(hdr, col, ',')) cols.push_back(col);
        if (cols.size() < 4 || cols[0] != "opponent_id" || cols[1] != "episode" || cols[2] != "t")
            throw DataError("embeddings: unexpected header in " + path);
        width = cols.size() - 3;
    }

    std::vector<EmbeddingSample> out;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        EmbeddingSample s;
        try {
            std::getline(row, cell, ',');
            s.opponent_id = std::stoi(cell);
            std::getline(row, cell, ',');
            s.episode = std::stoi(cell);
            std::getline(row, cell, ',');
            s.t = std::stoi(cell);
            while (std::getline(row, cell, ',')) s.z.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw DataError("embeddings: malformed row in " + path + ": " + line);
        }
        if (s.z.size() != width)
            throw DataError("embeddings: row width mismatch in " + path + ": " + line);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace omlab::repr
