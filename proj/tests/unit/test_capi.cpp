#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>

#include "dtlab/dtlab.h"

TEST_CASE("version and worker control") {
  const char* v = dtl_version();
  REQUIRE(v != nullptr);
  CHECK(std::strlen(v) >= 5);
  CHECK(dtl_set_worker_count(2) == DTL_OK);
  CHECK(dtl_set_worker_count(0) == DTL_OK);  // clamped to serial
  CHECK(dtl_set_worker_count(1) == DTL_OK);
}

TEST_CASE("state laws over the C boundary") {
  dtl_law* law = nullptr;
  REQUIRE(dtl_law_isentropic(1.4, 2.0, &law) == DTL_OK);
  REQUIRE(law != nullptr);

  double p = 0.0;
  CHECK(dtl_law_pressure(law, 2.0, &p) == DTL_OK);
  CHECK(p == doctest::Approx(std::pow(2.0, 1.4)).epsilon(1e-14));
  CHECK(dtl_law_pressure_prime(law, 2.0, &p) == DTL_OK);
  CHECK(p == doctest::Approx(1.4 * std::pow(2.0, 0.4)).epsilon(1e-14));

  double lo = 1, hi = 1;
  int lo_open = 7, hi_open = 7;
  CHECK(dtl_law_domain(law, &lo, &hi, &lo_open, &hi_open) == DTL_OK);
  CHECK(lo == 0.0);
  CHECK(std::isinf(hi));
  CHECK(lo_open == 0);
  dtl_law_free(law);

  law = nullptr;
  CHECK(dtl_law_isentropic(0.5, 1.0, &law) == DTL_E_INVALID_ARGUMENT);
  CHECK(law == nullptr);
  CHECK(std::strlen(dtl_last_error()) > 0);

  CHECK(dtl_law_pressure(nullptr, 1.0, &p) == DTL_E_INVALID_ARGUMENT);

  dtl_law* sc = nullptr;
  REQUIRE(dtl_law_slightly_compressible(0.5, &sc) == DTL_OK);
  CHECK(dtl_law_pressure(sc, 2.0, &p) == DTL_OK);
  CHECK(p == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(dtl_law_pressure(sc, -1.0, &p) == DTL_E_DOMAIN);
  dtl_law_free(sc);
  dtl_law_free(nullptr);  // must be a no-op
}

TEST_CASE("substitutions over the C boundary") {
  dtl_law* law = nullptr;
  REQUIRE(dtl_law_ideal(1.0, 1, &law) == DTL_OK);

  dtl_transform* t = nullptr;
  REQUIRE(dtl_transform_make(law, 1.0, &t) == DTL_OK);
  dtl_law_free(law);  // transform keeps its own reference

  double w = 0.0;
  CHECK(dtl_transform_f(t, 1.0, &w) == DTL_OK);
  CHECK(w == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
  double s = 0.0;
  CHECK(dtl_transform_f_inv(t, w, &s) == DTL_OK);
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  double fp = 0.0;
  CHECK(dtl_transform_fprime(t, 1.0, &fp) == DTL_OK);
  CHECK(fp == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  dtl_transform_free(t);
  dtl_transform_free(nullptr);

  double l1 = 0.0, l2 = 0.0;
  CHECK(dtl_lambda_thresholds(2.0, 1.0, 4.0, 1, 1e-6, &l1, &l2) == DTL_OK);
  CHECK(l1 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(l2 == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(dtl_lambda_thresholds(0.0, 1.0, 4.0, 1, 1e-6, &l1, &l2) == DTL_E_INVALID_BOUND);
}

TEST_CASE("kernel moments over the C boundary") {
  const double mu[2] = {0.1, -0.2};
  const double sigma[4] = {0.1, 0.03, 0.03, 0.06};
  dtl_kernel* k = nullptr;
  REQUIRE(dtl_kernel_gaussian(2, mu, sigma, 0.05, 8.0, &k) == DTL_OK);

  const double origin[2] = {0.0, 0.0};
  double mean[2], second[4], diffusion[4], drift[2];
  REQUIRE(dtl_kernel_moments(k, origin, 0.0, 48, mean, second, diffusion, drift) == DTL_OK);
  CHECK(mean[0] == doctest::Approx(0.1).epsilon(1e-7));
  CHECK(mean[1] == doctest::Approx(-0.2).epsilon(1e-7));
  // second moment = covariance + mu mu^T
  CHECK(second[0] == doctest::Approx(0.11).epsilon(1e-7));
  CHECK(second[1] == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(second[3] == doctest::Approx(0.10).epsilon(1e-7));
  CHECK(diffusion[0] == doctest::Approx(second[0] / 0.1).epsilon(1e-15));
  CHECK(drift[0] == doctest::Approx(mean[0] / 0.05).epsilon(1e-15));

  // Null outputs are allowed individually.
  REQUIRE(dtl_kernel_moments(k, origin, 0.0, 48, nullptr, nullptr, diffusion, nullptr) == DTL_OK);
  CHECK(diffusion[3] == doctest::Approx(0.10 / 0.1).epsilon(1e-6));

  CHECK(dtl_kernel_moments(k, origin, 0.0, 1, mean, nullptr, nullptr, nullptr) ==
        DTL_E_QUADRATURE);
  CHECK(dtl_kernel_moments(k, nullptr, 0.0, 48, mean, nullptr, nullptr, nullptr) ==
        DTL_E_INVALID_ARGUMENT);
  dtl_kernel_free(k);

  dtl_kernel* bad = nullptr;
  CHECK(dtl_kernel_gaussian(2, mu, sigma, 0.0, 8.0, &bad) == DTL_E_INVALID_ARGUMENT);
  CHECK(bad == nullptr);
  CHECK(dtl_kernel_gaussian(0, mu, sigma, 0.05, 8.0, &bad) == DTL_E_INVALID_ARGUMENT);
}

TEST_CASE("scenario runs over the C boundary") {
  const char* cfg_path = "capi_tiny.cfg";
  {
    std::ofstream out(cfg_path);
    out << "[scenario]\nname = capi_tiny\nkind = pde\n"
           "[law]\ntype = ideal\nfull_line = true\n"
           "[coefficients]\nmode = direct\nA = 1\nK = 0\nB = 0\n"
           "[grid]\nlo = 0\nhi = 1\nn = 16\n"
           "[problem]\nu_star = 0\nu0 = sine\namplitude = 1\nt_end = 0.02\n"
           "[checks]\nmax_principle = true\n";
  }

  dtl_result* r = nullptr;
  REQUIRE(dtl_run_scenario_file(cfg_path, nullptr, nullptr, &r) == DTL_OK);
  REQUIRE(r != nullptr);

  const char* name = nullptr;
  CHECK(dtl_result_name(r, &name) == DTL_OK);
  CHECK(std::string(name) == "capi_tiny");

  int passed = 0;
  CHECK(dtl_result_passed(r, &passed) == DTL_OK);
  CHECK(passed == 1);

  const char* text = nullptr;
  CHECK(dtl_result_text(r, &text) == DTL_OK);
  CHECK(std::string(text).find("max_principle") != std::string::npos);

  double c0 = 0.0;
  CHECK(dtl_result_metric(r, "c0", &c0) == DTL_OK);
  CHECK(c0 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(dtl_result_metric(r, "nonexistent_metric", &c0) == DTL_E_INVALID_ARGUMENT);

  size_t nfiles = 99;
  CHECK(dtl_result_file_count(r, &nfiles) == DTL_OK);
  CHECK(nfiles == 0);
  const char* path = nullptr;
  CHECK(dtl_result_file_path(r, 0, &path) == DTL_E_INVALID_ARGUMENT);
  dtl_result_free(r);
  dtl_result_free(nullptr);

  dtl_result* missing = nullptr;
  CHECK(dtl_run_preset("no_such_preset", nullptr, nullptr, &missing) == DTL_E_CONFIG);
  CHECK(missing == nullptr);
  CHECK(dtl_run_scenario_file("no_such_file.cfg", nullptr, nullptr, &missing) == DTL_E_CONFIG);
  std::remove(cfg_path);
}

TEST_CASE("preset listing is valid JSON") {
  char* listing = nullptr;
  REQUIRE(dtl_list_presets(1, &listing) == DTL_OK);
  REQUIRE(listing != nullptr);
  const nlohmann::json parsed = nlohmann::json::parse(listing);
  REQUIRE(parsed.is_array());
  CHECK(parsed.size() == 7);
  bool found = false;
  for (const auto& item : parsed) {
    REQUIRE(item.contains("name"));
    REQUIRE(item.contains("description"));
    found |= item["name"] == "heat_baseline";
  }
  CHECK(found);
  dtl_string_free(listing);

  char* table = nullptr;
  REQUIRE(dtl_list_presets(0, &table) == DTL_OK);
  CHECK(std::string(table).find("heat_baseline") != std::string::npos);
  dtl_string_free(table);
  dtl_string_free(nullptr);
}
