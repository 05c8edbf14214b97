#include <cstdint>
#include <vector>

#include "cbcsti/cipher.hpp"
#include "doctest.h"
#include "support/test_images.hpp"

using namespace cbcsti;
using cbcsti::testing::make_random_image;
using cbcsti::testing::make_textured_image;

static const SecretKey kKey =
    SecretKey::from_hex("0123456789abcdef0123456789abcdef");

TEST_CASE("key hex round trip and word extraction") {
    CHECK(kKey.to_hex() == "0123456789abcdef0123456789abcdef");
    CHECK(kKey.word(0) == 0x01234567u);
    CHECK(kKey.word(3) == 0x89abcdefu);
    CHECK_THROWS(SecretKey::from_hex("1234"));
    CHECK_THROWS(SecretKey::from_hex("0123456789abcdef0123456789abcdeg"));
}

TEST_CASE("parameter derivation clamps and scales") {
    const double eps = 9.5367431640625e-07;  // 2^-20
    SecretKey zero{};
    ChaoticParameters pz = derive_parameters(zero);
    CHECK(pz.alpha.p == doctest::Approx(eps));
    CHECK(pz.beta.p == doctest::Approx(eps));
    CHECK(pz.x0.to_real() == doctest::Approx(eps));
    CHECK(pz.lfsr_seed == 1u);  // zero seed forced nonzero

    SecretKey half{};
    half.bytes[0] = 0x80;  // w1 = 2^31
    ChaoticParameters ph = derive_parameters(half);
    CHECK(ph.alpha.p == doctest::Approx(0.25));

    ChaoticParameters pk = derive_parameters(kKey);
    CHECK(pk.lfsr_seed == (kKey.word(2) ^ kKey.word(3)));
}

TEST_CASE("config validation") {
    CipherConfig cfg = CipherConfig::defaults(Variant::A);
    CHECK_NOTHROW(cfg.validate());
    cfg.rounds = 6;
    CHECK_THROWS(cfg.validate());
    cfg.rounds = 4;
    cfg.map_params = ArnoldParams(1, 1, 3);  // variant A expects the sine map
    CHECK_THROWS(cfg.validate());

    CipherConfig e = CipherConfig::defaults(Variant::E);
    CHECK_FALSE(e.uses_pixel_permutation());
    CHECK(std::holds_alternative<std::monostate>(e.map_params));

    CHECK(CipherConfig::defaults(Variant::B).perm_kind() == PermKind::cross);
    CHECK(CipherConfig::defaults(Variant::D).perm_kind() == PermKind::cross);
    CHECK(CipherConfig::defaults(Variant::C).perm_kind() == PermKind::socek);
}

TEST_CASE("spn byte primitive inverts for every variant and round count") {
    ChaoticParameters params = derive_parameters(kKey);
    for (Variant v : {Variant::A, Variant::B, Variant::C, Variant::D, Variant::E})
        for (unsigned rounds : {4u, 8u}) {
            CipherConfig cfg = CipherConfig::defaults(v, BlockMode::OFB, rounds);
            std::vector<std::uint8_t> plain(3 * rounds + 5);
            for (std::size_t i = 0; i < plain.size(); ++i)
                plain[i] = static_cast<std::uint8_t>(i * 37 + 11);
            auto ct = ecb_encrypt_body(plain, kKey, cfg);
            CHECK(ct != plain);
            CHECK(ecb_decrypt_body(ct, kKey, cfg) == plain);
        }
    (void)params;
}

TEST_CASE("round trip across every variant and mode") {
    ImageBuffer img = make_textured_image(64, 3, 3);
    for (Variant v : {Variant::A, Variant::B, Variant::C, Variant::D, Variant::E})
        for (BlockMode m : {BlockMode::CBC, BlockMode::OFB, BlockMode::CFB, BlockMode::CTR}) {
            CipherConfig cfg = CipherConfig::defaults(v, m);
            CipherText ct = encrypt_image(img, kKey, cfg);
            ImageBuffer back = decrypt_image(ct, kKey, config_from_header(ct.header));
            CHECK(back.data == img.data);
            CHECK(ct.body != img.data);
        }
}

TEST_CASE("non-square images pad and unpad transparently") {
    ImageBuffer img = make_random_image(37, 22, 3, 77);
    CipherConfig cfg = CipherConfig::defaults(Variant::C, BlockMode::CBC);
    CipherText ct = encrypt_image(img, kKey, cfg);
    CHECK(ct.header.width == 37u);
    CHECK(ct.header.height == 37u);
    CHECK(ct.header.original_width == 37u);
    CHECK(ct.header.original_height == 22u);
    ImageBuffer back = decrypt_image(ct, kKey, config_from_header(ct.header));
    CHECK(back.width == 37u);
    CHECK(back.height == 22u);
    CHECK(back.data == img.data);
}

TEST_CASE("cfb narrow segments round trip") {
    ImageBuffer img = make_random_image(16, 16, 1, 5);
    for (unsigned s : {1u, 4u, 8u}) {
        CipherConfig cfg = CipherConfig::defaults(Variant::A, BlockMode::CFB);
        cfg.cfb_segment_bits = s;
        CipherText ct = encrypt_image(img, kKey, cfg);
        CHECK(ct.header.segment_bits == s);
        ImageBuffer back = decrypt_image(ct, kKey, config_from_header(ct.header));
        CHECK(back.data == img.data);
    }
}

TEST_CASE("ofb and ctr are xor stream modes") {
    // c = p xor keystream, so p xor c is plaintext independent
    std::vector<std::uint8_t> p1(300), p2(300);
    for (std::size_t i = 0; i < p1.size(); ++i) {
        p1[i] = static_cast<std::uint8_t>(i);
        p2[i] = static_cast<std::uint8_t>(255 - i);
    }
    for (BlockMode m : {BlockMode::OFB, BlockMode::CTR}) {
        CipherConfig cfg = CipherConfig::defaults(Variant::E, m);
        auto c1 = encrypt_body(p1, kKey, cfg, 0x5A);
        auto c2 = encrypt_body(p2, kKey, cfg, 0x5A);
        for (std::size_t i = 0; i < p1.size(); ++i)
            CHECK(static_cast<std::uint8_t>(c1[i] ^ p1[i]) ==
                  static_cast<std::uint8_t>(c2[i] ^ p2[i]));
    }
}

TEST_CASE("cbc single-bit error touches exactly two plaintext blocks") {
    std::vector<std::uint8_t> plain(600);
    for (std::size_t i = 0; i < plain.size(); ++i)
        plain[i] = static_cast<std::uint8_t>(i * 13);
    CipherConfig cfg = CipherConfig::defaults(Variant::E, BlockMode::CBC);
    const std::uint8_t iv = 0x3C;
    auto ct = encrypt_body(plain, kKey, cfg, iv);
    ct[200] ^= 0x10;
    auto back = decrypt_body(ct, kKey, cfg, iv);
    std::vector<std::size_t> diffs;
    for (std::size_t i = 0; i < plain.size(); ++i)
        if (back[i] != plain[i]) diffs.push_back(i);
    CHECK(diffs.size() == 2u);
    CHECK(diffs[0] == 200u);
    CHECK(diffs[1] == 201u);
    // the feed-forward block is a clean xor of the flipped bit
    CHECK(static_cast<std::uint8_t>(back[201] ^ plain[201]) == 0x10);
}

TEST_CASE("encryption is deterministic for a fixed config") {
    ImageBuffer img = make_random_image(16, 16, 3, 1);
    CipherConfig cfg = CipherConfig::defaults(Variant::B, BlockMode::CTR);
    CipherText a = encrypt_image(img, kKey, cfg);
    CipherText b = encrypt_image(img, kKey, cfg);
    CHECK(a.serialize() == b.serialize());
}

TEST_CASE("container survives a serialize/parse cycle") {
    ImageBuffer img = make_random_image(8, 8, 1, 2);
    for (Variant v : {Variant::A, Variant::C, Variant::E}) {
        CipherConfig cfg = CipherConfig::defaults(v, BlockMode::CFB);
        CipherText ct = encrypt_image(img, kKey, cfg);
        auto bytes = ct.serialize();
        CipherText parsed = CipherText::parse(bytes);
        CHECK(parsed.body == ct.body);
        CHECK(parsed.header.iv == ct.header.iv);
        CHECK(parsed.header.width == ct.header.width);
        CHECK(parsed.serialize() == bytes);
    }
}

TEST_CASE("container rejects damage") {
    ImageBuffer img = make_random_image(8, 8, 1, 2);
    CipherConfig cfg = CipherConfig::defaults(Variant::A);
    auto bytes = encrypt_image(img, kKey, cfg).serialize();
    auto truncated = bytes;
    truncated.resize(bytes.size() - 10);
    CHECK_THROWS(CipherText::parse(truncated));
    auto bad_magic = bytes;
    bad_magic[0] ^= 0xFF;
    CHECK_THROWS(CipherText::parse(bad_magic));
    CHECK_THROWS(CipherText::parse(std::vector<std::uint8_t>{}));
}

TEST_CASE("wrong key fails to decrypt") {
    ImageBuffer img = make_textured_image(32, 1, 4);
    CipherConfig cfg = CipherConfig::defaults(Variant::A, BlockMode::CBC);
    CipherText ct = encrypt_image(img, kKey, cfg);
    SecretKey other = kKey;
    other.bytes[15] ^= 0x01;
    ImageBuffer wrong = decrypt_image(ct, other, config_from_header(ct.header));
    CHECK(wrong.data != img.data);
}

TEST_CASE("explicit iv overrides the derived one") {
    ImageBuffer img = make_random_image(8, 8, 1, 3);
    CipherConfig cfg = CipherConfig::defaults(Variant::E, BlockMode::OFB);
    cfg.iv = 0xAB;
    CipherText ct = encrypt_image(img, kKey, cfg);
    CHECK(ct.header.iv == 0xAB);
    ChaoticParameters params = derive_parameters(kKey);
    CipherConfig derived = CipherConfig::defaults(Variant::E, BlockMode::OFB);
    CHECK(derive_iv(params, derived) == encrypt_image(img, kKey, derived).header.iv);
}
