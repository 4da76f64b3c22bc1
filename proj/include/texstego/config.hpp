#ifndef TEXSTEGO_CONFIG_HPP
#define TEXSTEGO_CONFIG_HPP

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "morphable.hpp"
#include "wavelet.hpp"

namespace texstego {

/**
 * Runtime settings, read from a JSON file such as
 *
 *     {"wavelet": "haar", "als": {"tolerance": 1e-8, "max_iterations": 500}}
 *
 * Missing keys keep their defaults.
 */
struct Config {
    WaveletFamily wavelet = WaveletFamily::haar;
    double als_tolerance = 1e-8;
    std::size_t als_max_iterations = 500;

    static Config from_json(const nlohmann::json& j) {
        Config c;
        if (j.contains("wavelet")) {
            const auto name = j.at("wavelet").get<std::string>();
            const auto family = parse_wavelet_family(name);
            if (!family) {
                throw Error(Errc::parameter, "config: unknown wavelet family '" + name + "'");
            }
            c.wavelet = *family;
        }
        if (j.contains("als")) {
            const auto& als = j.at("als");
            c.als_tolerance = als.value("tolerance", c.als_tolerance);
            c.als_max_iterations = als.value("max_iterations", c.als_max_iterations);
            if (!(c.als_tolerance > 0.0) || c.als_max_iterations == 0) {
                throw Error(Errc::parameter, "config: ALS tolerance and iteration budget must be positive");
            }
        }
        return c;
    }

    static Config load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) {
            throw Error(Errc::io, "cannot open config " + path.string());
        }
        try {
            return from_json(nlohmann::json::parse(in));
        } catch (const nlohmann::json::exception& e) {
            throw Error(Errc::parameter, "config " + path.string() + ": " + e.what());
        }
    }

    /// Explicit path wins; otherwise TEXSTEGO_CONFIG; otherwise defaults.
    static Config resolve(const std::optional<std::filesystem::path>& explicit_path) {
        if (explicit_path) {
            return load(*explicit_path);
        }
        if (const char* env = std::getenv("TEXSTEGO_CONFIG"); env && *env) {
            return load(env);
        }
        return {};
    }

    PcaOptions pca_options(MissingPolicy policy, Eigen::Index components = 0) const {
        PcaOptions o;
        o.missing = policy;
        o.components = components;
        o.tolerance = als_tolerance;
        o.max_iterations = als_max_iterations;
        return o;
    }
};

}  // namespace texstego

#endif  // TEXSTEGO_CONFIG_HPP
