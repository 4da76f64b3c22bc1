// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "test_util.hpp"

#ifndef TEXSTEGO_CLI_PATH
#error "TEXSTEGO_CLI_PATH must point at the texstego executable"
#endif

namespace {

using namespace texstego;
using texstego::testing::file_bytes;
using texstego::testing::gap_dominant_cover;
using texstego::testing::image_relative_error;
using texstego::testing::random_image;
using texstego::testing::random_matrix;
using texstego::testing::relative_error;
using Clock = std::chrono::steady_clock;

// Tolerances and thresholds.
constexpr double kRoundTripTol = 1e-8;
constexpr double kRoundTripSeconds = 5.0;
constexpr double kPsnrFloorDb = 70.0;
constexpr double kNeutralityTol = 1e-12;
constexpr double kWaveletReconTol = 1e-12;
constexpr double kWaveletEnergyTol = 1e-10;
constexpr double kWaveletSeconds = 2.0;
constexpr double kPsnrFormulaTol = 1e-3;
constexpr double kPcaTol = 1e-9;
constexpr double kAlsObservedTol = 1e-6;
constexpr double kAlpha = 0.1;
constexpr Eigen::Index kFaceRows = 53490;

struct Verdict {
    bool pass;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

double max_plane_error(const Matrix& got, const Matrix& want) {
    double worst = 0.0;
    for (Eigen::Index c = 0; c < 3; ++c) worst = std::max(worst, relative_error(got.col(c), want.col(c)));
    return worst;
}

// 1. Key-based round trip on gap-dominant covers at full 464 x 464 size.
Verdict round_trip() {
    double worst_err = 0.0;
    double worst_time = 0.0;
    bool all_gap = true;
    for (std::uint64_t seed : {101u, 202u, 303u}) {
        std::mt19937_64 rng(seed);
        const Matrix texture = random_matrix(rng, kFaceRows, 3, 0.0, 1.0);
        const FloatImage cover = gap_dominant_cover(rng, 232, 30.0);
        const auto t0 = Clock::now();
        const EmbedResult r = embed(cover, texture, kAlpha);
        const Matrix back = extract(r.stego, r.key);
        worst_time = std::max(worst_time, seconds_since(t0));
        all_gap = all_gap && r.warnings.empty();
        worst_err = std::max(worst_err, max_plane_error(back, texture));
    }
    // Smaller random instances of the same property.
    std::mt19937_64 rng(404);
    std::uniform_int_distribution<Eigen::Index> rows(1, 3000);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix texture = random_matrix(rng, rows(rng), 3, 0.0, 1.0);
        const FloatImage cover = gap_dominant_cover(rng, square_side(texture.rows()), 30.0);
        const EmbedResult r = embed(cover, texture, kAlpha);
        all_gap = all_gap && r.warnings.empty();
        worst_err = std::max(worst_err, max_plane_error(extract(r.stego, r.key), texture));
    }
    return {all_gap && worst_err <= kRoundTripTol && worst_time <= kRoundTripSeconds,
            "max per-plane rel err " + fmt(worst_err) + " (<= " + fmt(kRoundTripTol) + "), slowest 464x464 embed+extract " +
                fmt(worst_time) + " s (<= " + fmt(kRoundTripSeconds) + " s), gap condition held: " +
                (all_gap ? "yes" : "no")};
}

Matrix face_texture_0_255() {
    return synth_dataset(2024, kFaceRows, 2)[0].texture;
}

// 2a. PSNR floor for a [0, 255] face-sized texture in three random 8-bit covers.
Verdict psnr_floor() {
    const Matrix texture = face_texture_0_255();
    std::string values;
    bool pass = true;
    for (std::uint64_t seed : {11u, 22u, 33u}) {
        std::mt19937_64 rng(seed);
        const FloatImage cover = random_image(rng, 464, 464, 255.0);
        const double p = embed(cover, texture, kAlpha).psnr_db;
        pass = pass && p >= kPsnrFloorDb;
        values += (values.empty() ? "" : ", ") + fmt(p);
    }
    // Reference point: the same texture rescaled to [0, 1].
    std::mt19937_64 rng(11);
    const double unit_scale = embed(random_image(rng, 464, 464, 255.0), texture / 255.0, kAlpha).psnr_db;
    return {pass, "PSNR dB = {" + values + "} (floor " + fmt(kPsnrFloorDb) + "); same texture scaled to [0,1]: " +
                      fmt(unit_scale) + " dB"};
}

// 2b. PSNR is non-increasing in alpha.
Verdict psnr_monotone() {
    const Matrix texture = face_texture_0_255();
    std::mt19937_64 rng(44);
    const FloatImage cover = random_image(rng, 464, 464, 255.0);
    double previous = std::numeric_limits<double>::infinity();
    bool pass = true;
    std::string values;
    for (double alpha : {0.01, 0.05, 0.1, 0.5}) {
        const double p = embed(cover, texture, alpha).psnr_db;
        pass = pass && p <= previous;
        previous = p;
        values += (values.empty() ? "" : ", ") + fmt(p);
    }
    return {pass, "alpha {0.01, 0.05, 0.1, 0.5} -> PSNR {" + values + "} dB"};
}

// 3. Zero texture leaves the cover untouched.
Verdict zero_texture() {
    std::mt19937_64 rng(55);
    const FloatImage cover = random_image(rng, 464, 464, 255.0);
    const EmbedResult r = embed(cover, Matrix::Zero(kFaceRows, 3), kAlpha);
    const double err = image_relative_error(r.stego, cover);
    return {err <= kNeutralityTol, "rel err " + fmt(err) + " (<= " + fmt(kNeutralityTol) + ")"};
}

// 4. Perfect reconstruction and energy conservation of the Haar transform.
Verdict wavelet() {
    std::mt19937_64 rng(66);
    std::uniform_int_distribution<int> half(1, 32);
    double worst_recon = 0.0;
    double worst_energy = 0.0;
    const auto t0 = Clock::now();
    for (int trial = 0; trial < 100; ++trial) {
        const FloatImage x = random_image(rng, 2 * half(rng), 2 * half(rng));
        const SubbandSet s = dwt2(x);
        worst_recon = std::max(worst_recon, image_relative_error(idwt2(s), x));
        double in = 0.0;
        double out = 0.0;
        for (std::size_t c = 0; c < kChannels; ++c) {
            in += x.channel(c).squaredNorm();
            out += s.ca[c].squaredNorm() + s.ch[c].squaredNorm() + s.cv[c].squaredNorm() + s.cd[c].squaredNorm();
        }
        worst_energy = std::max(worst_energy, std::abs(out - in) / in);
    }
    const double elapsed = seconds_since(t0);
    return {worst_recon <= kWaveletReconTol && worst_energy <= kWaveletEnergyTol && elapsed <= kWaveletSeconds,
            "100 images: max recon err " + fmt(worst_recon) + ", max energy err " + fmt(worst_energy) + ", " +
                fmt(elapsed) + " s"};
}

// 5. Closed-form PSNR for a unit offset at S = 255.
Verdict psnr_formula() {
    FloatImage a(16, 16, 255.0);
    FloatImage b(16, 16, 255.0);
    for (std::size_t c = 0; c < kChannels; ++c) {
        a.channel(c).setConstant(100.0);
        b.channel(c).setConstant(101.0);
    }
    const double p = psnr(a, b);
    return {std::abs(p - 48.1308) <= kPsnrFormulaTol, "PSNR " + fmt(p) + " dB vs 48.1308"};
}

// 6. Face-sized packing and random round trips.
Verdict packing() {
    const ChannelPlaneSet p = pack_texture(Matrix::Ones(kFaceRows, 3));
    bool pass = p.side == 232 && p.pad_count == 334;
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<Eigen::Index> rows(1, 100000);
    int failures = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Matrix t = random_matrix(rng, rows(rng), 3, 0.0, 255.0);
        if (unpack_texture(pack_texture(t)) != t) ++failures;
    }
    pass = pass && failures == 0;
    return {pass, "N=53490 -> side " + std::to_string(p.side) + ", pad " + std::to_string(p.pad_count) +
                      "; 1000 random round trips, " + std::to_string(failures) + " failures"};
}

// 7. PCA identities, brute-force covariance spectrum, ALS recovery.
Verdict pca_suite() {
    std::mt19937_64 rng(88);
    double recon = 0.0;
    double self = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix x = random_matrix(rng, 50 + 100 * trial, 3, 0.0, 255.0);
        const PcaModel m = pca_fit(x);
        recon = std::max(recon, relative_error(m.reconstruct(), x));
        self = std::max(self, relative_error(reexpress(m, m), x));
    }

    double eig = 0.0;
    std::uniform_int_distribution<int> nv(1, 10);
    std::uniform_int_distribution<int> ns(2, 8);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = nv(rng);
        const int m = ns(rng);
        std::vector<Matrix> samples;
        for (int i = 0; i < m; ++i) samples.push_back(random_matrix(rng, n, 3));
        const BasisModel b = build_basis(samples);
        Matrix a(3 * n, m);
        for (int i = 0; i < m; ++i) {
            const Matrix d = samples[static_cast<std::size_t>(i)] - b.mean;
            a.col(i) = Eigen::Map<const Vector>(d.data(), 3 * n);
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(a * a.transpose() / static_cast<double>(m));
        const Vector want = es.eigenvalues().reverse();
        const Vector got = b.eigenvalues();
        for (Eigen::Index k = 0; k < want.size(); ++k) {
            eig = std::max(eig, std::abs((k < got.size() ? got(k) : 0.0) - want(k)));
        }
    }

    const Eigen::Index rows = 500;
    const Matrix truth = random_matrix(rng, rows, 2, -5.0, 5.0) * random_matrix(rng, 2, 3);
    Matrix masked = truth;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (Eigen::Index i = 0; i < masked.size(); ++i) {
        if (u(rng) < 0.05) masked(i) = std::numeric_limits<double>::quiet_NaN();
    }
    PcaOptions opts;
    opts.missing = MissingPolicy::als;
    opts.components = 2;
    const Matrix rec = pca_fit(masked, opts).reconstruct();
    double als = 0.0;
    for (Eigen::Index i = 0; i < masked.size(); ++i) {
        if (std::isfinite(masked(i))) als = std::max(als, std::abs(rec(i) - truth(i)));
    }

    const bool pass = recon <= kPcaTol && self <= kPcaTol && eig <= kPcaTol && als <= kAlsObservedTol;
    return {pass, "recon " + fmt(recon) + ", reexpress-self " + fmt(self) + ", eigenvalue " + fmt(eig) +
                      " (<= 1e-9); ALS observed-entry err " + fmt(als) + " (<= 1e-6)"};
}

// 8. Averaging semantics and the blended face sitting between its parents.
Verdict combination() {
    std::mt19937_64 rng(99);
    bool exact = true;
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix a = random_matrix(rng, 100, 3, 0.0, 255.0);
        const Matrix b = random_matrix(rng, 100, 3, 0.0, 255.0);
        exact = exact && combine_average(a, b) == linear_combine(std::vector<Matrix>{a, b}, std::vector<double>{0.5, 0.5});
    }
    const auto faces = synth_dataset(5, 5000, 2);
    const Matrix& t1 = faces[0].texture;
    const Matrix& t2 = faces[1].texture;
    const PcaModel m1 = pca_fit(t1);
    const PcaModel m2 = pca_fit(t2);
    const Matrix blended = combine_average(reexpress(m1, m2), reexpress(m2, m2));
    const double parents = (t1 - t2).norm();
    const double to1 = (blended - t1).norm();
    const double to2 = (blended - t2).norm();
    return {exact && to1 < parents && to2 < parents,
            std::string("average == (1/2,1/2) combination: ") + (exact ? "exact" : "MISMATCH") + "; |Tm-T1| " + fmt(to1) +
                ", |Tm-T2| " + fmt(to2) + " < |T1-T2| " + fmt(parents)};
}

// 9. Repeated CLI pipelines with a fixed seed produce identical bytes.
Verdict determinism() {
    texstego::testing::TempDir dir("accept");
    std::mt19937_64 rng(123);
    io::save_stego(random_image(rng, 40, 40, 255.0), dir / "cover.stg");

    auto pipeline = [&](const std::string& tag, std::string& stdout_text) {
        const auto d = dir.path() / tag;
        const std::string cli = TEXSTEGO_CLI_PATH;
        const std::string log = (d / "stdout.txt").string();
        std::filesystem::create_directories(d);
        const std::vector<std::string> cmds{
            "--seed 42 synth --vertices 1500 --samples 3 --out " + d.string(),
            "embed --cover " + (dir / "cover.stg") + " --texture " + (d / "texture_000.txm").string() + " --out " +
                (d / "s.stg").string() + " --key " + (d / "k.key").string(),
            "extract --stego " + (d / "s.stg").string() + " --key " + (d / "k.key").string() + " --out " +
                (d / "r.txm").string(),
            "combine --texture " + (d / "texture_000.txm").string() + " " + (d / "texture_001.txm").string() +
                " --out " + (d / "tm.txm").string(),
        };
        for (const auto& c : cmds) {
            if (std::system((cli + " " + c + " >> " + log + " 2>/dev/null").c_str()) != 0) return false;
        }
        const auto bytes = file_bytes(log);
        stdout_text.assign(bytes.begin(), bytes.end());
        return true;
    };
    std::string out_a, out_b;
    if (!pipeline("a", out_a) || !pipeline("b", out_b)) return {false, "CLI pipeline failed"};
    int compared = 0;
    bool same = true;
    for (const char* f : {"shape_000.txm", "texture_002.txm", "s.stg", "k.key", "r.txm", "tm.txm"}) {
        same = same && file_bytes(dir.path() / "a" / f) == file_bytes(dir.path() / "b" / f);
        ++compared;
    }
    std::string a_lines = out_a;
    std::string b_lines = out_b;
    // Paths differ between the two runs; everything else must match.
    auto strip = [&](std::string s, const std::string& tag) {
        const std::string needle = (dir.path() / tag).string();
        for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle)) s.erase(pos, needle.size());
        return s;
    };
    same = same && strip(a_lines, "a") == strip(b_lines, "b");
    return {same, std::to_string(compared) + " output files + stdout compared, " + (same ? "identical" : "DIFFERENT")};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Verdict()> check;
    };
    const std::vector<Criterion> criteria{
        {"C1 key-based round-trip fidelity", round_trip},
        {"C2a PSNR >= 70 dB, [0,255] texture, 8-bit covers", psnr_floor},
        {"C2b PSNR monotone in alpha", psnr_monotone},
        {"C3 zero-texture neutrality", zero_texture},
        {"C4 wavelet reconstruction + energy", wavelet},
        {"C5 PSNR closed form", psnr_formula},
        {"C6 texture packing", packing},
        {"C7 PCA suite", pca_suite},
        {"C8 combination behaviour", combination},
        {"C9 CLI determinism", determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Verdict v{false, ""};
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += v.pass ? 0 : 1;
        std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << v.detail << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
