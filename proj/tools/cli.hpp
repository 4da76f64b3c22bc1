#ifndef TEXSTEGO_TOOLS_CLI_HPP
#define TEXSTEGO_TOOLS_CLI_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <texstego/texstego.hpp>

namespace texstego::cli {

namespace fs = std::filesystem;
using nlohmann::json;

/// JSON-lines sink: stdout plus an optional mirror file.
class Emitter {
public:
    explicit Emitter(std::ostream& out) : out_(out) {}

    void mirror_to(const fs::path& path) {
        file_.open(path, std::ios::app);
        if (!file_) {
            throw Error(Errc::io, "cannot open JSON output " + path.string());
        }
    }

    void emit(const json& j) {
        const auto line = j.dump();
        out_ << line << '\n';
        if (file_.is_open()) {
            file_ << line << '\n';
        }
    }

    void warn(const std::string& command, const std::string& message) {
        emit(json{{"command", command}, {"warning", message}});
    }

private:
    std::ostream& out_;
    std::ofstream file_;
};

/// STG1 containers and PNG files are both accepted wherever an image is read.
inline FloatImage load_image(const fs::path& path) {
    const std::string head = io::sniff_magic(path);
    if (head.rfind(io::kStegoMagic, 0) == 0) {
        return io::load_stego(path);
    }
    if (head.size() == 8 && head.rfind("\x89PNG", 0) == 0) {
        return io::import_png(path);
    }
    throw Error(Errc::bad_magic, path.string() + ": neither a STG1 container nor a PNG file");
}

inline ExtractionMode parse_mode(const std::string& s) {
    return s == "literal" ? ExtractionMode::literal : ExtractionMode::key_based;
}

inline MissingPolicy parse_missing(const std::string& s) {
    return s == "als" ? MissingPolicy::als : MissingPolicy::none;
}

inline std::string plane_path(const std::string& prefix, char channel) {
    return prefix + "_" + channel + ".txm";
}

inline std::string indexed_name(const char* stem, std::int64_t i) {
    std::ostringstream s;
    s << stem << '_' << std::setw(3) << std::setfill('0') << i << ".txm";
    return s.str();
}

/**
 * Runs one command-line invocation. Exit status: 0 success, 1 usage error,
 * 2 data or format error, 3 numeric failure. Results go to `out` as JSON
 * lines, diagnostics to `err`.
 */
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    CLI::App app{"Hide 3-D face textures in images and combine face models", "texstego"};
    app.require_subcommand(1, 1);

    std::uint64_t seed = 1;
    std::optional<std::string> config_path;
    std::optional<std::string> json_path;
    int verbosity = 0;
    app.add_option("--seed", seed, "seed for synthetic data")->capture_default_str();
    app.add_option("--config", config_path, "JSON config file (overrides TEXSTEGO_CONFIG)");
    app.add_option("--json", json_path, "also append JSON result lines to this file");
    app.add_flag("-v,--verbose", verbosity, "diagnostics on stderr");

    const std::vector<std::string> modes{"key", "literal"};
    const std::vector<std::string> policies{"none", "als"};

    // embed
    std::string cover_path, texture_path, out_path, key_path, png_out;
    double alpha = kDefaultAlpha;
    std::string mode = "key";
    int depth = 8;
    auto* embed_cmd = app.add_subcommand("embed", "hide a texture matrix in a cover image");
    embed_cmd->add_option("--cover", cover_path, "cover image (PNG or STG1)")->required();
    embed_cmd->add_option("--texture", texture_path, "N x 3 texture matrix (TXM1)")->required();
    embed_cmd->add_option("--alpha", alpha, "embedding strength")->capture_default_str();
    embed_cmd->add_option("--mode", mode, "extraction mode recorded in the key")
        ->check(CLI::IsMember(modes))
        ->capture_default_str();
    embed_cmd->add_option("--out", out_path, "stego image (STG1, lossless)")->required();
    embed_cmd->add_option("--key", key_path, "key file to write")->required();
    embed_cmd->add_option("--png-out", png_out, "also export the stego as PNG (lossy for extraction)");
    embed_cmd->add_option("--depth", depth, "PNG export bit depth")->check(CLI::IsMember({8, 16}));

    // extract
    std::string stego_path;
    std::optional<std::string> extract_mode;
    auto* extract_cmd = app.add_subcommand("extract", "recover a hidden texture");
    extract_cmd->add_option("--stego", stego_path, "stego image (STG1 or PNG)")->required();
    extract_cmd->add_option("--key", key_path, "key written by embed")->required();
    extract_cmd->add_option("--mode", extract_mode, "override the key's extraction mode")
        ->check(CLI::IsMember(modes));
    extract_cmd->add_option("--out", out_path, "recovered texture (TXM1)")->required();

    // combine
    std::vector<std::string> textures, shapes;
    std::string shape_out;
    std::string missing = "none";
    Eigen::Index components = 0;
    auto* combine_cmd = app.add_subcommand("combine", "blend two faces through PCA re-expression and averaging");
    combine_cmd->add_option("--texture", textures, "two texture matrices")->required()->expected(2);
    combine_cmd->add_option("--shape", shapes, "two shape matrices")->expected(2);
    combine_cmd->add_option("--out", out_path, "combined texture (TXM1)")->required();
    combine_cmd->add_option("--shape-out", shape_out, "combined shape (TXM1)");
    combine_cmd->add_option("--missing", missing, "missing-value policy")->check(CLI::IsMember(policies));
    combine_cmd->add_option("--components", components, "ALS imputation rank (0 = all)");

    // pca-fit
    std::string input_path;
    auto* pca_cmd = app.add_subcommand("pca-fit", "fit a per-column PCA model to an N x 3 matrix");
    pca_cmd->add_option("--input", input_path, "matrix (TXM1)")->required();
    pca_cmd->add_option("--out", out_path, "model bundle (PCA1)")->required();
    pca_cmd->add_option("--missing", missing, "missing-value policy")->check(CLI::IsMember(policies));
    pca_cmd->add_option("--components", components, "ALS imputation rank (0 = all)");

    // basis-build
    std::vector<std::string> inputs;
    auto* basis_cmd = app.add_subcommand("basis-build", "principal components of a set of N x 3 samples");
    basis_cmd->add_option("--input", inputs, "sample matrices (TXM1)")->required();
    basis_cmd->add_option("--out", out_path, "model bundle (PCA1)")->required();

    // psnr
    std::string a_path, b_path;
    auto* psnr_cmd = app.add_subcommand("psnr", "compare two images");
    psnr_cmd->add_option("--a", a_path, "first image")->required();
    psnr_cmd->add_option("--b", b_path, "second image")->required();

    // pack
    auto* pack_cmd = app.add_subcommand("pack", "fold a texture into three square planes");
    pack_cmd->add_option("--texture", texture_path, "N x 3 texture (TXM1)")->required();
    pack_cmd->add_option("--out", out_path, "output prefix; writes <prefix>_{r,g,b}.txm")->required();

    // synth
    std::int64_t vertices = 1000;
    std::int64_t samples = 2;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic shape/texture dataset");
    synth_cmd->add_option("--vertices", vertices, "vertices per face")->capture_default_str();
    synth_cmd->add_option("--samples", samples, "number of faces")->capture_default_str();
    synth_cmd->add_option("--out", out_path, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    auto log = [&](const std::string& msg) {
        if (verbosity > 0) {
            err << "texstego: " << msg << '\n';
        }
    };

    Emitter emitter(out);
    try {
        if (json_path) {
            emitter.mirror_to(*json_path);
        }
        const Config config = Config::resolve(config_path ? std::optional<fs::path>(*config_path) : std::nullopt);

        if (*embed_cmd) {
            FloatImage cover = load_image(cover_path);
            const Matrix texture = io::load_matrix(texture_path);
            const auto side = square_side(texture.rows());
            if (cover.height() != 2 * side || cover.width() != 2 * side) {
                emitter.warn("embed", "cover resized from " + std::to_string(cover.height()) + "x" +
                                          std::to_string(cover.width()) + " to " +
                                          std::to_string(2 * side) + "x" + std::to_string(2 * side));
                cover = prepare_cover(cover, side);
            }
            log("embedding " + std::to_string(texture.rows()) + "x3 texture, side " + std::to_string(side));
            const EmbedResult r = embed(cover, texture, alpha, parse_mode(mode), config.wavelet);
            for (const auto& w : r.warnings) {
                emitter.warn("embed", w);
            }
            io::save_stego(r.stego, out_path);
            io::save_key(r.key, key_path);
            if (!png_out.empty()) {
                io::export_png(r.stego, depth, png_out);
                emitter.warn("embed", "PNG export quantises samples; extract from the STG1 file instead");
            }
            const QualityReport q = quality(cover, r.stego);
            json j = q.to_json();
            j["command"] = "embed";
            j["alpha"] = alpha;
            j["side"] = side;
            j["pad_count"] = r.key.pad_count;
            j["mode"] = to_string(r.key.mode);
            emitter.emit(j);
        } else if (*extract_cmd) {
            const FloatImage stego = load_image(stego_path);
            StegoKey key = io::load_key(key_path);
            if (extract_mode) {
                key.mode = parse_mode(*extract_mode);
            }
            const Matrix texture = extract(stego, key);
            io::save_matrix(texture, out_path);
            emitter.emit(json{{"command", "extract"},
                              {"rows", texture.rows()},
                              {"mode", to_string(key.mode)},
                              {"out", out_path}});
        } else if (*combine_cmd) {
            const PcaOptions opts = config.pca_options(parse_missing(missing), components);
            auto blend = [&](const std::string& first, const std::string& second) {
                const PcaModel m1 = pca_fit(io::load_matrix(first), opts);
                const PcaModel m2 = pca_fit(io::load_matrix(second), opts);
                return combine_average(reexpress(m1, m2), reexpress(m2, m2));
            };
            const Matrix texture = blend(textures[0], textures[1]);
            io::save_matrix(texture, out_path);
            json j{{"command", "combine"}, {"rows", texture.rows()}, {"texture_out", out_path}};
            if (!shapes.empty()) {
                if (shape_out.empty()) {
                    throw Error(Errc::usage, "--shape requires --shape-out");
                }
                const Matrix shape = blend(shapes[0], shapes[1]);
                io::save_matrix(shape, shape_out);
                j["shape_out"] = shape_out;
            }
            emitter.emit(j);
        } else if (*pca_cmd) {
            const PcaModel m = pca_fit(io::load_matrix(input_path),
                                       config.pca_options(parse_missing(missing), components));
            io::save_pca_model(m, out_path);
            std::vector<double> mean(m.mean.data(), m.mean.data() + m.mean.size());
            std::vector<double> variance;
            const double dof = static_cast<double>(std::max<Eigen::Index>(m.score.rows() - 1, 1));
            for (Eigen::Index k = 0; k < m.score.cols(); ++k) {
                variance.push_back(m.score.col(k).squaredNorm() / dof);
            }
            emitter.emit(json{{"command", "pca-fit"}, {"mean", mean}, {"explained_variance", variance}});
        } else if (*basis_cmd) {
            std::vector<Matrix> data;
            for (const auto& p : inputs) {
                data.push_back(io::load_matrix(p));
            }
            const BasisModel m = build_basis(data);
            io::save_basis(m, out_path);
            const Vector ev = m.eigenvalues();
            emitter.emit(json{{"command", "basis-build"},
                              {"samples", m.sample_count},
                              {"components", m.components.size()},
                              {"eigenvalues", std::vector<double>(ev.data(), ev.data() + ev.size())}});
        } else if (*psnr_cmd) {
            const QualityReport q = quality(load_image(a_path), load_image(b_path));
            json j = q.to_json();
            j["command"] = "psnr";
            emitter.emit(j);
        } else if (*pack_cmd) {
            const ChannelPlaneSet p = pack_texture(io::load_matrix(texture_path));
            const char names[] = {'r', 'g', 'b'};
            for (std::size_t c = 0; c < kChannels; ++c) {
                io::save_matrix(p.planes[c], plane_path(out_path, names[c]));
            }
            emitter.emit(json{{"command", "pack"},
                              {"side", p.side},
                              {"pad_count", p.pad_count},
                              {"original_rows", p.original_rows}});
        } else if (*synth_cmd) {
            const auto faces = synth_dataset(seed, vertices, samples);
            fs::create_directories(out_path);
            for (std::size_t i = 0; i < faces.size(); ++i) {
                const auto idx = static_cast<std::int64_t>(i);
                io::save_matrix(faces[i].shape, fs::path(out_path) / indexed_name("shape", idx));
                io::save_matrix(faces[i].texture, fs::path(out_path) / indexed_name("texture", idx));
            }
            emitter.emit(json{{"command", "synth"},
                              {"seed", seed},
                              {"vertices", vertices},
                              {"samples", samples},
                              {"out", out_path}});
        }
    } catch (const Error& e) {
        err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        if (e.code() == Errc::usage) {
            err << '\n' << app.help();
        }
        return exit_code(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace texstego::cli

#endif  // TEXSTEGO_TOOLS_CLI_HPP
