#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cbcsti/analysis.hpp"
#include "cbcsti/cipher.hpp"
#include "cbcsti/image_io.hpp"
#include "json.hpp"

using namespace cbcsti;

namespace {

struct KeyOpts {
    std::string hex;
    std::string file;

    SecretKey resolve() const {
        if (!hex.empty()) return SecretKey::from_hex(hex);
        if (!file.empty()) {
            std::ifstream in(file);
            if (!in) throw std::runtime_error("cannot open key file: " + file);
            std::string line;
            std::getline(in, line);
            while (!line.empty() && (line.back() == '\r' || line.back() == '\n' ||
                                     line.back() == ' '))
                line.pop_back();
            return SecretKey::from_hex(line);
        }
        throw std::runtime_error("a key is required (--key or --key-file)");
    }
};

struct ConfigOpts {
    std::string variant = "A";
    std::string mode = "ofb";
    unsigned rounds = 4;
    unsigned segment_bits = 8;
    double map_k = 0.0;        // 0: keep the variant default
    unsigned map_it = 0;       // 0: keep the variant default
    unsigned arnold_t = 0;
    unsigned arnold_q = 0;
    int iv = -1;

    CipherConfig resolve() const {
        Variant v;
        if (variant == "A" || variant == "a") v = Variant::A;
        else if (variant == "B" || variant == "b") v = Variant::B;
        else if (variant == "C" || variant == "c") v = Variant::C;
        else if (variant == "D" || variant == "d") v = Variant::D;
        else if (variant == "E" || variant == "e") v = Variant::E;
        else throw std::runtime_error("unknown variant: " + variant);
        BlockMode m;
        if (mode == "cbc") m = BlockMode::CBC;
        else if (mode == "ofb") m = BlockMode::OFB;
        else if (mode == "cfb") m = BlockMode::CFB;
        else if (mode == "ctr") m = BlockMode::CTR;
        else throw std::runtime_error("unknown mode: " + mode);
        CipherConfig cfg = CipherConfig::defaults(v, m, rounds);
        cfg.cfb_segment_bits = segment_bits;
        if (auto* sp = std::get_if<StandardMapParams>(&cfg.map_params)) {
            if (map_k > 0.0) sp->k = map_k;
            if (map_it > 0) sp->iterations = map_it;
        } else if (auto* ap = std::get_if<ArnoldParams>(&cfg.map_params)) {
            if (arnold_t > 0) ap->t = arnold_t;
            if (arnold_q > 0) ap->q = arnold_q;
            if (map_it > 0) ap->iterations = map_it;
        }
        if (iv >= 0) cfg.iv = static_cast<std::uint8_t>(iv);
        cfg.validate();
        return cfg;
    }

    void attach(CLI::App* app) {
        app->add_option("--variant", variant, "Cipher variant A..E (default A)");
        app->add_option("--mode", mode, "Block mode: cbc, ofb, cfb, ctr (default ofb)");
        app->add_option("--rounds", rounds, "Substitution-permutation rounds (multiple of 4)");
        app->add_option("--segment-bits", segment_bits, "CFB segment width in bits (1..8)");
        app->add_option("--map-k", map_k, "Sine map strength (variants A/B)");
        app->add_option("--map-iterations", map_it, "Pixel permutation iterations");
        app->add_option("--arnold-t", arnold_t, "Cat map parameter t (variants C/D)");
        app->add_option("--arnold-q", arnold_q, "Cat map parameter q (variants C/D)");
        app->add_option("--iv", iv, "Explicit IV byte 0..255 (default: key-derived)");
    }
};

void attach_key(CLI::App* app, KeyOpts& key) {
    auto* k = app->add_option("--key", key.hex, "128-bit key as 32 hex characters");
    auto* f = app->add_option("--key-file", key.file, "File holding the hex key");
    k->excludes(f);
}

std::string report_path(const std::string& out) {
    if (out.empty() || out.front() == '/') return out;
    const char* dir = std::getenv("CBCSTI_REPORT_DIR");
    if (!dir || !*dir) return out;
    return std::string(dir) + "/" + out;
}

void emit_report(const FlatReport& rep, bool json, const std::string& out) {
    std::string text;
    if (json) {
        nlohmann::ordered_json doc;
        for (const auto& [k, v] : rep.entries()) {
            if (!v.empty() && v.find_first_not_of("0123456789") == std::string::npos) {
                doc[k] = std::stoull(v);
                continue;
            }
            try {
                std::size_t pos = 0;
                double num = std::stod(v, &pos);
                if (pos == v.size()) {
                    doc[k] = num;
                    continue;
                }
            } catch (const std::exception&) {
            }
            doc[k] = v;
        }
        text = doc.dump(2) + "\n";
    } else {
        text = rep.to_text();
    }
    if (out.empty()) {
        std::cout << text;
    } else {
        const std::string path = report_path(out);
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write report: " + path);
        f << text;
    }
}

// Full-buffer write through a temp file so a failure never leaves partial output.
void write_file_atomic(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output: " + tmp);
        f.write(reinterpret_cast<const char*>(bytes.data()),
                static_cast<std::streamsize>(bytes.size()));
        if (!f) {
            std::remove(tmp.c_str());
            throw std::runtime_error("write failed: " + tmp);
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("cannot move output into place: " + path);
    }
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open input: " + path);
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(f),
                                     std::istreambuf_iterator<char>());
}

struct FlipSpec {
    std::uint32_t x = 0, y = 0, channel = 0;
    unsigned bit = 0;
};

FlipSpec parse_flip(const std::string& s) {
    FlipSpec fs;
    unsigned vals[4] = {0, 0, 0, 0};
    int n = std::sscanf(s.c_str(), "%u,%u,%u,%u", &vals[0], &vals[1], &vals[2], &vals[3]);
    if (n < 3) throw std::runtime_error("--flip expects x,y,channel[,bit]");
    fs.x = vals[0];
    fs.y = vals[1];
    fs.channel = vals[2];
    fs.bit = n >= 4 ? vals[3] : 0;
    if (fs.bit > 7) throw std::runtime_error("--flip bit must be 0..7");
    return fs;
}

int run_selftest() {
    int failures = 0;
    auto check = [&](bool ok, const char* what) {
        std::cout << (ok ? "ok   " : "FAIL ") << what << "\n";
        if (!ok) ++failures;
    };

    bool sub_ok = true;
    for (unsigned r = 0; r < 2 && sub_ok; ++r)
        for (int u = 0; u < 256 && sub_ok; ++u)
            for (int v = 0; v < 256; ++v)
                if (substitute_inverse(substitute(static_cast<std::uint8_t>(u),
                                                  static_cast<std::uint8_t>(v), r),
                                       static_cast<std::uint8_t>(v), r) != u) {
                    sub_ok = false;
                    break;
                }
    check(sub_ok, "substitution inverse, exhaustive");

    bool socek_ok = true;
    for (std::uint32_t ctrl = 0; ctrl < 65536 && socek_ok; ++ctrl) {
        BitPermutation p = socek_permutation_from_control(static_cast<std::uint16_t>(ctrl));
        if (!p.is_valid()) {
            socek_ok = false;
            break;
        }
        for (int b = 0; b < 256; b += 17)
            if (socek_inverse(socek_permute(static_cast<std::uint8_t>(b), p), p) != b) {
                socek_ok = false;
                break;
            }
    }
    check(socek_ok, "socek control sweep, exhaustive");

    bool cross_ok = true;
    for (int cfg = 0; cfg < 256 && cross_ok; ++cfg)
        for (int b = 0; b < 256; ++b)
            if (cross_inverse(cross_permute(static_cast<std::uint8_t>(b),
                                            static_cast<std::uint8_t>(cfg), 1, 4),
                              static_cast<std::uint8_t>(cfg), 1, 4) != b) {
                cross_ok = false;
                break;
            }
    check(cross_ok, "cross permutation inverse, exhaustive");

    for (std::uint32_t n : {16u, 64u, 512u}) {
        bool ok = true;
        try {
            GridPermutation::build(MapParams(StandardMapParams()), n);
            GridPermutation::build(MapParams(ArnoldParams(1, 1, 3)), n);
        } catch (const std::exception&) {
            ok = false;
        }
        std::ostringstream what;
        what << "grid bijectivity, n = " << n;
        check(ok, what.str().c_str());
    }

    std::cout << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chaos-based image encryption toolkit"};
    app.require_subcommand(1);

    bool json = false;
    auto add_json = [&json](CLI::App* sub) {
        sub->add_flag("--json", json, "Emit the report as a single JSON document");
    };

    KeyOpts key;
    ConfigOpts cfgopts;
    std::string in_path, out_path, cmp_path;
    std::size_t corr_samples = 0;
    std::uint64_t seed = 0;
    std::string flip_spec;
    double pe = -1.0;
    int keybit = -1;
    double alpha_shift = 0.0;
    FlipSpec pt{};
    std::string pt_spec = "0,0,0,0";
    std::size_t orbit_words = 65536;
    unsigned orbit_index = 1;

    auto* enc = app.add_subcommand("encrypt", "Encrypt an image into a container file");
    attach_key(enc, key);
    cfgopts.attach(enc);
    enc->add_option("--in", in_path, "Input image (ppm/pgm/bmp)")->required();
    enc->add_option("--out", out_path, "Output container file")->required();

    auto* dec = app.add_subcommand("decrypt", "Decrypt a container file back to an image");
    attach_key(dec, key);
    dec->add_option("--in", in_path, "Input container file")->required();
    dec->add_option("--out", out_path, "Output image (ppm/pgm/bmp)")->required();

    auto* ana = app.add_subcommand("analyze", "Statistical report on one or two images");
    ana->add_option("--in", in_path, "Image to analyze")->required();
    ana->add_option("--cmp", cmp_path, "Second image for NPCR/UACI comparison");
    ana->add_option("--samples", corr_samples,
                    "Random adjacent pairs per correlation (0 = all pairs)");
    ana->add_option("--seed", seed, "Sampling seed");
    ana->add_option("--out", out_path, "Report file (default: stdout)");
    add_json(ana);

    auto* chn = app.add_subcommand("channel", "Error propagation through a noisy channel");
    attach_key(chn, key);
    cfgopts.attach(chn);
    chn->add_option("--in", in_path, "Carrier image")->required();
    chn->add_option("--flip", flip_spec, "Single-bit flip at x,y,channel[,bit]");
    chn->add_option("--pe", pe, "Channel bit-error probability for a Monte-Carlo run");
    chn->add_option("--seed", seed, "Channel noise seed");
    chn->add_option("--out", out_path, "Report file (default: stdout)");
    add_json(chn);

    auto* ks = app.add_subcommand("keysens", "Ciphertext sensitivity to a key change");
    attach_key(ks, key);
    cfgopts.attach(ks);
    ks->add_option("--in", in_path, "Plain image")->required();
    ks->add_option("--bit", keybit, "Key bit to flip, 0..127 from the MSB");
    ks->add_option("--alpha-shift", alpha_shift, "Additive perturbation of alpha instead");
    ks->add_option("--out", out_path, "Report file (default: stdout)");
    add_json(ks);

    auto* ps = app.add_subcommand("ptsens", "Ciphertext sensitivity to a plaintext change");
    attach_key(ps, key);
    cfgopts.attach(ps);
    ps->add_option("--in", in_path, "Plain image")->required();
    ps->add_option("--flip", pt_spec, "Plaintext bit to flip, x,y,channel[,bit]");
    ps->add_option("--out", out_path, "Report file (default: stdout)");
    add_json(ps);

    auto* od = app.add_subcommand("orbit-dump", "Dump raw chaotic orbit bytes");
    attach_key(od, key);
    od->add_option("--words", orbit_words, "Number of 32-bit orbit words");
    od->add_option("--orbit", orbit_index, "Which orbit: 1 (alpha,x0) or 2 (beta,y0)");
    od->add_option("--out", out_path, "Output byte file")->required();

    app.add_subcommand("selftest", "Exhaustive inverse and bijectivity checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("selftest")) return run_selftest();

        if (app.got_subcommand("encrypt")) {
            const SecretKey k = key.resolve();
            const CipherConfig cfg = cfgopts.resolve();
            ImageBuffer img = load_image(in_path);
            const auto t0 = std::chrono::steady_clock::now();
            CipherText ct = encrypt_image(img, k, cfg);
            const auto t1 = std::chrono::steady_clock::now();
            write_file_atomic(out_path, ct.serialize());
            std::cerr << "encrypted " << img.width << "x" << img.height << "x"
                      << img.channels << " in "
                      << std::chrono::duration<double, std::milli>(t1 - t0).count()
                      << " ms\n";
            return 0;
        }

        if (app.got_subcommand("decrypt")) {
            const SecretKey k = key.resolve();
            CipherText ct = CipherText::parse(read_file(in_path));
            ImageBuffer img = decrypt_image(ct, k, config_from_header(ct.header));
            save_image(img, out_path);
            return 0;
        }

        if (app.got_subcommand("analyze")) {
            ImageBuffer img = load_image(in_path);
            std::optional<ImageBuffer> cmp;
            if (!cmp_path.empty()) cmp = load_image(cmp_path);
            FlatReport rep =
                build_stat_report(img, cmp ? &*cmp : nullptr, corr_samples, seed);
            emit_report(rep, json, out_path);
            return 0;
        }

        if (app.got_subcommand("channel")) {
            const SecretKey k = key.resolve();
            const CipherConfig cfg = cfgopts.resolve();
            ImageBuffer img = load_image(in_path);
            FlatReport rep;
            rep.add("mode", std::string(to_string(cfg.mode)));
            if (!flip_spec.empty()) {
                FlipSpec fs = parse_flip(flip_spec);
                std::uint64_t blocks =
                    count_erroneous_blocks(k, cfg, img, fs.x, fs.y, fs.channel, fs.bit);
                rep.add("flip.x", static_cast<std::uint64_t>(fs.x));
                rep.add("flip.y", static_cast<std::uint64_t>(fs.y));
                rep.add("flip.channel", static_cast<std::uint64_t>(fs.channel));
                rep.add("flip.bit", static_cast<std::uint64_t>(fs.bit));
                rep.add("blocks", blocks);
            } else if (pe >= 0.0) {
                ErrorPropagationReport ep =
                    measure_error_propagation(k, cfg, img, {pe, seed});
                rep.add("ep.pe", ep.p_e);
                rep.add("ep.predicted", ep.predicted);
                rep.add("ep.measured", ep.measured);
                rep.add("ep.sample_bits", ep.sample_bits);
            } else {
                throw std::runtime_error("channel needs --flip or --pe");
            }
            emit_report(rep, json, out_path);
            return 0;
        }

        if (app.got_subcommand("keysens")) {
            const SecretKey k = key.resolve();
            const CipherConfig cfg = cfgopts.resolve();
            ImageBuffer img = load_image(in_path);
            KeyDelta delta = alpha_shift != 0.0
                                 ? KeyDelta::alpha_shift(alpha_shift)
                                 : KeyDelta::key_bit(keybit < 0 ? 127u
                                                                : static_cast<unsigned>(keybit));
            KeySensitivityReport r = key_sensitivity(img, k, cfg, delta);
            FlatReport rep;
            rep.add("npcr", r.npcr_overall);
            for (std::size_t c = 0; c < r.npcr_channel.size(); ++c)
                rep.add("npcr." + channel_suffix(static_cast<std::uint32_t>(c)),
                        r.npcr_channel[c]);
            rep.add("uaci", r.mean_uaci);
            emit_report(rep, json, out_path);
            return 0;
        }

        if (app.got_subcommand("ptsens")) {
            const SecretKey k = key.resolve();
            const CipherConfig cfg = cfgopts.resolve();
            ImageBuffer img = load_image(in_path);
            pt = parse_flip(pt_spec);
            PlaintextSensitivityReport r =
                plaintext_sensitivity(img, k, cfg, pt.x, pt.y, pt.channel, pt.bit);
            FlatReport rep;
            rep.add("blocks", r.changed_blocks);
            rep.add("first_diff", r.first_diff);
            rep.add("npcr", r.npcr_from_flip);
            rep.add("uaci", r.uaci_whole);
            emit_report(rep, json, out_path);
            return 0;
        }

        if (app.got_subcommand("orbit-dump")) {
            const SecretKey k = key.resolve();
            ChaoticParameters params = derive_parameters(k);
            const bool first = orbit_index <= 1;
            PerturbedOrbit orbit(first ? params.alpha : params.beta,
                                 first ? params.x0 : params.y0,
                                 LfsrConfig(32, params.lfsr_seed, 1));
            std::vector<std::uint8_t> bytes;
            bytes.reserve(orbit_words * 4);
            for (std::size_t i = 0; i < orbit_words; ++i) {
                std::uint32_t w = orbit.next().raw;
                bytes.push_back(static_cast<std::uint8_t>(w >> 24));
                bytes.push_back(static_cast<std::uint8_t>(w >> 16));
                bytes.push_back(static_cast<std::uint8_t>(w >> 8));
                bytes.push_back(static_cast<std::uint8_t>(w));
            }
            write_file_atomic(out_path, bytes);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "error: no subcommand\n";
    return 1;
}
