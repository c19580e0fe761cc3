#include <gtest/gtest.h>

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "anncap/report.hpp"
#include "support.hpp"

using namespace anncap;
using anncap::test::Gen;

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, sep)) out.push_back(field);
  return out;
}

SweepReport buckley_sweep(int jobs) {
  const GalleryEntry b = make_buckley(0.5);
  return verify_envelope(b.space, {BoundId::UpperSimple, 2.0}, thin_family(1.0, 1, 12), {}, Gating::Diagnose, jobs);
}

}  // namespace

TEST(FormatProperty, RoundTripsExactly) {
  Gen g(71);
  for (int trial = 0; trial < 5000; ++trial) {
    const double x = (g.coin() ? 1 : -1) * std::ldexp(g.uniform(0.5, 1.0), g.integer(-1070, 1020));
    const std::string s = format_number(x);
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), x) << s;
    EXPECT_EQ(s.find(','), std::string::npos);
    std::size_t digits = 0;
    bool leading = true;
    for (char c : s.substr(0, s.find('e'))) {
      if (c < '0' || c > '9') continue;
      leading = leading && c == '0';
      digits += !leading;
    }
    EXPECT_LE(digits, 17u) << s;
  }
}

TEST(Format, SpecialValues) {
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(INFINITY), "inf");
  EXPECT_EQ(format_number(-INFINITY), "-inf");
  EXPECT_EQ(format_number(NAN), "nan");
  EXPECT_EQ(json_number(INFINITY).dump(), "\"inf\"");
  EXPECT_EQ(json_number(2.5).dump(), "2.5");
  EXPECT_EQ(json_exact(2.5).dump(), "\"2.5\"");
}

TEST(Report, CapacitySchema) {
  const CapacityResult c = compute_capacity(make_rn(2).space, 2.0, AnnulusSpec(1.0, 2.0));
  const Json j = to_json(c);
  ASSERT_TRUE(j["value"].is_string());
  EXPECT_EQ(j["value"].get<std::string>(), format_number(c.value));
  EXPECT_EQ(j["value"].get<std::string>().rfind("9.06472028365438", 0), 0u);
  EXPECT_EQ(j["method"], "ClosedForm");
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"value", "method", "quadrature_error"}));
}

TEST(Report, SweepCsvRoundTrips) {
  const SweepReport r = buckley_sweep(1);
  std::ostringstream out;
  write_sweep_csv(r, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "r,R,cap,bound,ratio");
  std::size_t k = 0;
  while (std::getline(in, line)) {
    const auto f = split(line, ',');
    ASSERT_EQ(f.size(), 5u);
    ASSERT_LT(k, r.rows.size());
    const auto& row = r.rows[k++];
    EXPECT_EQ(std::strtod(f[0].c_str(), nullptr), row.r);
    EXPECT_EQ(std::strtod(f[1].c_str(), nullptr), row.R);
    EXPECT_EQ(std::strtod(f[2].c_str(), nullptr), row.cap);
    EXPECT_EQ(std::strtod(f[3].c_str(), nullptr), row.bound);
    EXPECT_EQ(std::strtod(f[4].c_str(), nullptr), row.ratio);
  }
  EXPECT_EQ(k, r.rows.size());
}

TEST(Report, SweepJsonVerdictBlock) {
  const Json j = to_json(buckley_sweep(1));
  EXPECT_EQ(j["bound"], "UpperSimple");
  EXPECT_EQ(j["quantity"], "capacity");
  EXPECT_EQ(j["annuli"], 12);
  EXPECT_EQ(j["verdict"], "PASS");
  EXPECT_NEAR(j["quantity_slope"].get<double>(), -1.5, 0.05);
}

TEST(Report, OutputIsIndependentOfJobsAndReruns) {
  const SweepReport a = buckley_sweep(1), b = buckley_sweep(3), c = buckley_sweep(1);
  std::ostringstream ca, cb, cc;
  write_sweep_csv(a, ca);
  write_sweep_csv(b, cb);
  write_sweep_csv(c, cc);
  EXPECT_EQ(ca.str(), cb.str());
  EXPECT_EQ(ca.str(), cc.str());
  EXPECT_EQ(to_json(a).dump(2), to_json(b).dump(2));

  const SpaceSpec s = make_rn(2).space;
  const AnnulusSpec ann(1.0, 2.0);
  const auto o1 = compare_with_formula(compute_capacity(s, 2.0, ann).value, radial_oracle(s, 2.0, ann, 400));
  const auto o2 = compare_with_formula(compute_capacity(s, 2.0, ann).value, radial_oracle(s, 2.0, ann, 400));
  EXPECT_EQ(to_json(o1).dump(), to_json(o2).dump());
  EXPECT_FALSE(to_json(o1)["discrete"].contains("seconds"));
}

TEST(Report, AdReportsNone) {
  const GalleryEntry sn = make_snake();
  const Json j = to_json(estimate_ad_exponent(sn.space, sn.probes.ad_family));
  EXPECT_EQ(j["ad"], "NONE");
  EXPECT_EQ(j["has_ad"], false);
  const Json o = to_json(check_one_ad(sn.space, 1.0, 64.0));
  EXPECT_EQ(o["jump_detected"], true);
}

TEST(Report, BlowupSchema) {
  TraitSet t;
  t.pi_exponents = {{1.0, true}};
  const SpaceSpec h("flat", HalfLine{}, WeightSpec(), t);
  const BlowupReport b = blowup_probe(h, 2.0, 1.0, {0.5, 0.25, 0.125}, {}, Gating::Enforce, 1.0);
  const Json j = to_json(b);
  EXPECT_EQ(j["rows"].size(), 3u);
  EXPECT_EQ(j["rows"][2]["cap"], format_number(b.rows[2].cap));
  EXPECT_EQ(j["direction"], "inner");
  EXPECT_FALSE(j.contains("refinements"));
  std::ostringstream csv;
  write_blowup_csv(b, csv);
  EXPECT_EQ(csv.str().substr(0, 10), "delta,cap\n");
}
