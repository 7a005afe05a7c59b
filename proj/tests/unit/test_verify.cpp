// Copyright 2026 The fluidlb Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "helpers.hpp"

#include "fluidlb/verify.hpp"

using namespace fluidlb;
using namespace fluidlb::test;

TEST_CASE("suite passes on the two-pool example") {
  VerifyOptions opts;
  opts.random_scenarios = 10;
  opts.random_cases = 50;
  const VerifyReport rep = run_verification(scen_a(), opts);
  CHECK(rep.passed());
  CHECK(rep.properties.size() == 10);
  for (const auto& p : rep.properties) {
    INFO(p.name, ": ", p.detail);
    CHECK(p.passed);
    CHECK(p.cases > 0);
  }
}

TEST_CASE("fault hook trips the gradient check only") {
  VerifyOptions opts;
  opts.random_scenarios = 3;
  opts.random_cases = 20;
  opts.fault = Fault::kGradient;
  const VerifyReport rep = run_verification(scen_a(), opts);
  CHECK_FALSE(rep.passed());
  CHECK(rep.failing() == std::vector<std::string>{"gradient-consistency"});
  CHECK(verify_report_text(rep).find("FAIL gradient-consistency") != std::string::npos);
}

TEST_CASE("same seed, same report") {
  VerifyOptions opts;
  opts.random_scenarios = 3;
  opts.random_cases = 20;
  const std::string a = verify_report_text(run_verification(scen_a(), opts));
  CHECK(a == verify_report_text(run_verification(scen_a(), opts)));
  opts.seed = 99;
  CHECK(verify_report_text(run_verification(scen_a(), opts)).find("all properties hold") !=
        std::string::npos);
}

TEST_CASE("fault names") {
  CHECK(fault_from_string("") == Fault::kNone);
  CHECK(fault_from_string("gradient") == Fault::kGradient);
  CHECK_THROWS_AS(fault_from_string("nope"), ValidationError);
}
