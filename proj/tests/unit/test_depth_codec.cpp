#include "doctest.h"

#include <cmath>

#include "scapegeom/depth_codec.hpp"

using namespace scapegeom;
using namespace scapegeom::depth;

TEST_CASE("normalize") {
  CHECK(normalize_depth(0.0) == 0.0);
  CHECK(normalize_depth(300.0) == 1.0);
  CHECK(normalize_depth(150.0) == 0.5);
  CHECK(normalize_depth(1e6) == 1.0);
  CHECK(denormalize_depth(0.5) == 150.0);
  try {
    normalize_depth(-0.1);
    FAIL("expected NegativeDepth");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNegativeDepth);
  }
  CHECK_THROWS_AS(encode_depth16(-1.0), Error);
}

TEST_CASE("config") {
  CHECK(validate(DepthCodecConfig{}).ok);
  CHECK_FALSE(validate(DepthCodecConfig{0.0}).ok);
  CHECK(normalize_depth(40.0, {80.0}) == 0.5);
}

TEST_CASE("16-bit endpoints and midrange") {
  CHECK(encode_depth16(0.0) == 0);
  CHECK(decode_depth16(0) == 0.0);
  CHECK(encode_depth16(300.0) == 65535);
  CHECK(decode_depth16(65535) == 300.0);
  CHECK(encode_depth16(500.0) == 65535);
  CHECK(encode_depth16(100.0) == 21845);
  // 21845 / 65535 is exactly 1/3, so the code decodes back to 100 m.
  CHECK(std::abs(decode_depth16(21845) - 100.0) <= 300.0 / 65535 / 2);
}

TEST_CASE("round trip bound on a dense grid") {
  const DepthCodecConfig cfg;
  for (int i = 0; i <= 300000; ++i) {
    const double d = i * 1e-3;
    const double err = std::abs(decode_depth16(encode_depth16(d, cfg), cfg) - d);
    if (!(err <= cfg.max_depth / 65535 / 2 + 1e-12)) {
      CHECK(err <= cfg.max_depth / 65535 / 2 + 1e-12);
      break;
    }
  }
}

TEST_CASE("every code round trips") {
  for (std::uint32_t c = 0; c <= 65535; ++c) {
    const auto code = static_cast<std::uint16_t>(c);
    if (encode_depth16(decode_depth16(code)) != code) {
      CHECK(encode_depth16(decode_depth16(code)) == code);
      break;
    }
  }
}

TEST_CASE("monotone") {
  double prev_n = -1.0;
  std::uint16_t prev_c = 0;
  for (int i = 0; i <= 40000; ++i) {
    const double d = i * 0.01;
    const double n = normalize_depth(d);
    const std::uint16_t c = encode_depth16(d);
    CHECK(n >= prev_n);
    CHECK(c >= prev_c);
    prev_n = n;
    prev_c = c;
  }
}

TEST_CASE("span overloads") {
  const std::vector<double> d{0.0, 150.0, 300.0};
  const auto codes = encode_depth16(d);
  CHECK(codes == std::vector<std::uint16_t>{0, 32768, 65535});
  const auto back = decode_depth16(codes);
  CHECK(back[0] == 0.0);
  CHECK(back[2] == 300.0);
}

TEST_CASE("vae loss") {
  RgbdImage target(2, 1);
  target.rgb = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  target.depth = {30.0, 60.0};
  CHECK(vae_loss(target.rgb, target.depth, target, 0.0) == 0.0);

  // Depth MSE 0.04 on the normalized scale: both pixels off by 0.2 * 300 m.
  std::vector<double> d2{90.0, 0.0};
  CHECK(vae_loss(target.rgb, d2, target, 0.5, 10.0) == doctest::Approx(10 * 0.04 + 0.5));

  // Same error in one rgb channel vs the depth channel: weights 1 and lambda.
  std::vector<double> rgb_err = target.rgb;
  rgb_err[0] += 0.3;
  std::vector<double> depth_err = target.depth;
  depth_err[0] += 0.3 * 300.0;
  const double e_rgb = vae_loss(rgb_err, target.depth, target, 0.0, 10.0);
  const double e_depth = vae_loss(target.rgb, depth_err, target, 0.0, 10.0);
  CHECK(e_rgb > 0.0);
  CHECK(e_depth == doctest::Approx(10.0 * e_rgb * 3.0));

  CHECK(vae_loss(rgb_err, target.depth, target, 0.2) > 0.0);
  CHECK_THROWS_AS(vae_loss(std::vector<double>{0.1}, target.depth, target, 0.0), Error);
  CHECK_THROWS_AS(vae_loss(target.rgb, target.depth, target, 0.0, -1.0), Error);
}
