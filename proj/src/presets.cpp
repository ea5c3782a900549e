#include "cloudrls/config.hpp"
#include "cloudrls/scenario.hpp"

#include <array>
#include <utility>

namespace cloudrls {

namespace {

constexpr const char* kExample1 = R"cfg(
[scenario]
name = example1
agents = 100
horizon = 1000
seed = 1

[model]
na = 1
nb = 1
nk = 0

[truth]
law = constant
theta = 0.9, 0.4

[input]
low = 2
high = 3

[noise]
law = uniform_int_variance
low = 1
high = 30

[estimation]
lambda = 1
phi0 = 0.1
init_local_std = 1.4142135623730951
init_global_std = 1

[consensus]
mode = full

[solver]
rho = 0.1
max_iters = 200
primal_tol = 1e-8
)cfg";

constexpr const char* kExample1NonInformative = R"cfg(
[scenario]
name = example1-noninformative
agents = 100
horizon = 5000
seed = 1

[model]
na = 1
nb = 1
nk = 0

[truth]
law = constant
theta = 0.9, 0.4

[input]
low = 2
high = 3

[noise]
law = uniform_int_variance
low = 1
high = 30

[anomalies]
non_informative = 20

[estimation]
lambda = 1
phi0 = 0.1
init_local_std = 1.4142135623730951
init_global_std = 1

[consensus]
mode = full

[solver]
rho = 0.1
max_iters = 200
primal_tol = 1e-8
)cfg";

constexpr const char* kExample1Failure = R"cfg(
[scenario]
name = example1-failure
agents = 100
horizon = 5000
seed = 1

[model]
na = 1
nb = 1
nk = 0

[truth]
law = constant
theta = 0.9, 0.4

[input]
low = 2
high = 3

[noise]
law = uniform_int_variance
low = 1
high = 30

[anomalies]
failures = 20
failure_window = 0.375, 0.75
failure_low = 0.2, 1.4
failure_high = 0.21, 1.43

[estimation]
lambda = 0.99
phi0 = 0.1
init_local_std = 1.4142135623730951
init_global_std = 1

[consensus]
mode = full

[solver]
rho = 0.1
max_iters = 200
primal_tol = 1e-8
)cfg";

constexpr const char* kExample2 = R"cfg(
[scenario]
name = example2
agents = 100
horizon = 1000
seed = 1

[model]
na = 1
nb = 1
nk = 0

[truth]
law = sincos
amplitudes = 0.9, 0.4

[input]
low = 2
high = 3

[noise]
law = uniform_int_variance
low = 1
high = 30

[estimation]
lambda = 0.95
phi0 = 0.1
init_local_std = 1.4142135623730951
init_global_std = 1

[consensus]
mode = full

[solver]
rho = 0.1
max_iters = 200
primal_tol = 1e-8
)cfg";

constexpr const char* kExample3 = R"cfg(
[scenario]
name = example3
agents = 100
horizon = 1000
seed = 1

[model]
na = 2
nb = 1
nk = 0

[truth]
law = global_local
global = 0.2, 0.8
local_position = 2
local_mean = 0.4
local_std = 0.05

[input]
low = 2
high = 3

[noise]
law = uniform_int_variance
low = 1
high = 20

[estimation]
lambda = 1
phi0 = 0.1
init_local_std = 1.4142135623730951
init_global_std = 1

[consensus]
mode = partial
p_rows = 1 0 0 ; 0 0 1

[solver]
rho = 0.1
max_iters = 200
primal_tol = 1e-8
)cfg";

constexpr const char* kExample3NonInformative = R"cfg(
[scenario]
name = example3-noninformative
agents = 100
horizon = 1000
seed = 1

[model]
na = 2
nb = 1
nk = 0

[truth]
law = global_local
global = 0.2, 0.8
local_position = 2
local_mean = 0.4
local_std = 0.05

[input]
low = 2
high = 3

[noise]
law = uniform_int_variance
low = 1
high = 20

[anomalies]
non_informative = 20

[estimation]
lambda = 1
phi0 = 0.1
init_local_std = 1.4142135623730951
init_global_std = 1

[consensus]
mode = partial
p_rows = 1 0 0 ; 0 0 1

[solver]
rho = 0.1
max_iters = 200
primal_tol = 1e-8
)cfg";

constexpr const char* kExample4S1 = R"cfg(
[scenario]
name = example4-S1
agents = 100
horizon = 5000
seed = 1

[model]
na = 2
nb = 1
nk = 0

[truth]
law = global_local
global = 0.2, 0.8
local_position = 2
local_mean = 0.4
local_std = 0.05

[input]
low = 2
high = 3

[noise]
law = uniform_int_variance
low = 1
high = 20

[estimation]
lambda = 0.99
phi0 = 0.1
init_local_std = 1.4142135623730951
init_global_std = 1

[consensus]
mode = constrained
p_rows = 1 0 0 ; 0 0 1
box_set = S1

[solver]
rho1 = 10
rho2 = 0.1
max_iters = 200
primal_tol = 1e-8
)cfg";

constexpr const char* kExample4S2 = R"cfg(
[scenario]
name = example4-S2
agents = 100
horizon = 5000
seed = 1

[model]
na = 2
nb = 1
nk = 0

[truth]
law = global_local
global = 0.2, 0.8
local_position = 2
local_mean = 0.4
local_std = 0.05

[input]
low = 2
high = 3

[noise]
law = uniform_int_variance
low = 1
high = 20

[estimation]
lambda = 0.99
phi0 = 0.1
init_local_std = 1.4142135623730951
init_global_std = 1

[consensus]
mode = constrained
p_rows = 1 0 0 ; 0 0 1
box_set = S2

[solver]
rho1 = 10
rho2 = 0.1
max_iters = 200
primal_tol = 1e-8
)cfg";

constexpr const char* kExample4S3 = R"cfg(
[scenario]
name = example4-S3
agents = 100
horizon = 5000
seed = 1

[model]
na = 2
nb = 1
nk = 0

[truth]
law = global_local
global = 0.2, 0.8
local_position = 2
local_mean = 0.4
local_std = 0.05

[input]
low = 2
high = 3

[noise]
law = uniform_int_variance
low = 1
high = 20

[estimation]
lambda = 0.99
phi0 = 0.1
init_local_std = 1.4142135623730951
init_global_std = 1

[consensus]
mode = constrained
p_rows = 1 0 0 ; 0 0 1
box_set = S3

[solver]
rho1 = 10
rho2 = 0.1
max_iters = 200
primal_tol = 1e-8
)cfg";

constexpr std::array<std::pair<const char*, const char*>, 9> kPresets = {{
    {"example1", kExample1},
    {"example1-noninformative", kExample1NonInformative},
    {"example1-failure", kExample1Failure},
    {"example2", kExample2},
    {"example3", kExample3},
    {"example3-noninformative", kExample3NonInformative},
    {"example4-S1", kExample4S1},
    {"example4-S2", kExample4S2},
    {"example4-S3", kExample4S3},
}};

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  names.reserve(kPresets.size());
  for (const auto& [name, _] : kPresets) names.emplace_back(name);
  return names;
}

bool is_preset(const std::string& name) {
  for (const auto& [preset, _] : kPresets)
    if (name == preset) return true;
  return false;
}

std::string preset_config_text(const std::string& name) {
  for (const auto& [preset, text] : kPresets)
    if (name == preset) return text;
  throw ConfigError("unknown preset '" + name + "'");
}

ScenarioConfig load_preset(const std::string& name) {
  return scenario_from_text(preset_config_text(name), "preset:" + name);
}

}  // namespace cloudrls
