#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "tf2d/hydrogen.hpp"

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  Run r;
  const std::string cmd = std::string(TF2D_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int st = pclose(pipe);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

nlohmann::json json_of(const Run& r) { return nlohmann::json::parse(r.out); }

}  // namespace

TEST_CASE("tf-solve") {
  const auto neutral = run("tf-solve --lambda 1.0 --output json");
  REQUIRE(neutral.status == 0);
  const auto j = json_of(neutral);
  CHECK(std::abs(j["mass"].get<double>() - 1.0) < 1e-6);
  CHECK(j["mu"].get<double>() == 0.0);
  CHECK(j["support_radius"].is_null());

  const auto ion = json_of(run("tf-solve --lambda 0.5 --output json"));
  CHECK(ion["mu"].get<double>() > 0.0);
  CHECK(ion["support_radius"].is_number());

  CHECK(run("tf-solve --lambda 0").status == 2);
  CHECK(run("tf-solve").status == 2);
  CHECK(run("tf-solve --lambda 1 --output xml").status == 2);

  const std::string csv_path = "cli_density.csv";
  const auto quiet = run("tf-solve --lambda 0.5 --quiet --density-csv " + csv_path);
  CHECK(quiet.status == 0);
  CHECK(quiet.out.empty());
  std::ifstream f(csv_path);
  std::string header;
  std::getline(f, header);
  CHECK(header == "r,rho,potential");
  std::remove(csv_path.c_str());
}

TEST_CASE("tf-curve") {
  const auto r = run("tf-curve --output csv");
  CHECK(r.status == 0);
  CHECK(r.out.rfind("lambda,mu,energy,mass,residual\n", 0) == 0);
  CHECK(run("tf-curve --lambdas 1,0.5").status == 2);
}

TEST_CASE("semiclassics") {
  const auto hyd = run("semiclassics --potential hydrogen-shifted --mu 1 --h 0.2,0.1,0.05 --output json");
  CHECK(hyd.status == 0);
  const auto j = json_of(hyd);
  CHECK(j["decreasing"].get<bool>());
  CHECK(j["reports"].size() == 3);
  CHECK(std::abs(j["weyl"].get<double>()) < 1e-10);

  const auto exact = json_of(run("semiclassics --exact --h 0.2,0.1 --output json"));
  CHECK(exact["reports"][1]["numeric_trace"].get<double>() ==
        doctest::Approx(tf2d::scaled_exact_trace(0.1, 1.0)).epsilon(1e-15));

  CHECK(run("semiclassics --h 0.05,0.1,0.2").status == 2);
  CHECK(run("semiclassics --potential nope --h 0.2,0.1").status == 2);
  CHECK(run("semiclassics --potential tf:abc --h 0.2,0.1").status == 2);

  // Same potential from a table.
  const std::string path = "cli_potential.csv";
  {
    std::ofstream f(path);
    f << "r,V\n";
    for (int k = 0; k <= 4000; ++k) {
      const double r = std::pow(10.0, -6.0 + 9.0 * k / 4000.0);
      f.precision(17);
      f << r << ',' << 1.0 / r - 1.0 << '\n';
    }
  }
  const auto table = run("semiclassics --potential file:" + path + " --h 0.2,0.1 --output json");
  const auto direct = run("semiclassics --h 0.2,0.1 --output json");
  REQUIRE(table.status == 0);
  const auto a = json_of(table)["reports"], b = json_of(direct)["reports"];
  for (int k = 0; k < 2; ++k)
    CHECK(a[k]["numeric_trace"].get<double>() ==
          doctest::Approx(b[k]["numeric_trace"].get<double>()).epsilon(1e-6));
  CHECK(run("semiclassics --potential file:" + path + " --kappa 2 --h 0.2,0.1").status == 1);
  std::remove(path.c_str());
  CHECK(run("semiclassics --potential file:/nonexistent --h 0.2,0.1").status == 2);

  const auto csv = run("semiclassics --h 0.2,0.1 --output csv");
  CHECK(csv.out.rfind("h,numeric,formula,residual,scaled_residual\n", 0) == 0);
}

TEST_CASE("semiclassics on V^TF") {
  const auto r = run("semiclassics --potential tf:1.0 --h 0.2,0.1,0.05 --output json");
  CHECK(r.status == 0);
  const auto reps = json_of(r)["reports"];
  REQUIRE(reps.size() == 3);
  for (int k = 1; k < 3; ++k)
    CHECK(std::abs(reps[k]["scaled_residual"].get<double>()) <
          std::abs(reps[k - 1]["scaled_residual"].get<double>()));
}

TEST_CASE("hydrogen-check and energy-predict") {
  const auto h = run("hydrogen-check --m-max 1000");
  CHECK(h.status == 0);
  CHECK(h.out.find("c_H = -2.23387") != std::string::npos);
  CHECK(run("hydrogen-check --m-max 3").status == 2);

  const auto e = run("energy-predict --Z 100 --N 100 --output json");
  REQUIRE(e.status == 0);
  const auto j = json_of(e);
  for (const char* key : {"Z", "N", "lambda", "E_predicted", "terms"}) CHECK(j.contains(key));
  CHECK(j["E_predicted"].get<double>() ==
        doctest::Approx(j["terms"]["leading"].get<double>() + j["terms"]["second"].get<double>()));
  // Flat beyond neutrality.
  const auto over = json_of(run("energy-predict --Z 100 --N 150 --output json"));
  CHECK(over["terms"]["second"].get<double>() == j["terms"]["second"].get<double>());
  CHECK(run("energy-predict --Z -1 --N 1").status == 2);
}

TEST_CASE("coulomb-check, verify-all subsets, determinism") {
  CHECK(run("coulomb-check --quiet").status == 0);
  const auto v = run("verify-all --criteria 1,2,4 --output json");
  CHECK(v.status == 0);
  const auto j = json_of(v);
  CHECK(j["passed"].get<bool>());
  CHECK(j["criteria"].size() == 3);
  CHECK(run("verify-all --criteria 1,2,4 --output json").out == v.out);
  const auto csv = run("verify-all --criteria 1 --output csv");
  CHECK(csv.out.rfind("id,name,passed,detail\n1,hydrogen constant,true,", 0) == 0);
  CHECK(run("verify-all --criteria 0").status == 2);
  CHECK(run("verify-all --criteria 3-1").status == 2);
  CHECK(run("no-such-command").status == 2);
  CHECK(run("").status == 2);
}
