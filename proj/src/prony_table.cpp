#include <array>
#include <cmath>
#include <sstream>

#include "memstep/errors.hpp"
#include "memstep/kernels.hpp"

namespace memstep {

namespace {

// 12-term sum-of-exponentials fits of exp(-t^beta), weights normalized to sum 1.
constexpr std::array<double, 3> kBetas{3.0 / 7.0, 1.0 / 2.0, 3.0 / 5.0};

constexpr std::array<std::array<PronyTerm, 12>, 3> kTable{{
    {{
        {0.02792, 0.03816},
        {0.09567, 0.10117},
        {0.13049, 0.22822},
        {0.13388, 0.47142},
        {0.12456, 0.94243},
        {0.10976, 1.88828},
        {0.09256, 3.86312},
        {0.07525, 8.15604},
        {0.05938, 17.92388},
        {0.04587, 41.47225},
        {0.03588, 104.13591},
        {0.06877, 402.71691},
    }},
    {{
        {0.01694, 0.06265},
        {0.08574, 0.13381},
        {0.14468, 0.26816},
        {0.15870, 0.52050},
        {0.14514, 1.00410},
        {0.12095, 1.96395},
        {0.09512, 3.94401},
        {0.07188, 8.20241},
        {0.05275, 17.81155},
        {0.03791, 40.85894},
        {0.02749, 102.07104},
        {0.04270, 383.52267},
    }},
    {{
        {0.01043, 0.12022},
        {0.08117, 0.20610},
        {0.17168, 0.35680},
        {0.19624, 0.63293},
        {0.16742, 1.15481},
        {0.12467, 2.17404},
        {0.08711, 4.23811},
        {0.05896, 8.59467},
        {0.03913, 18.25401},
        {0.02559, 41.07522},
        {0.01688, 100.99297},
        {0.02071, 363.84147},
    }},
}};

}  // namespace

std::span<const double> builtin_prony_betas() { return kBetas; }

PronySeries load_builtin_prony(double beta) {
  for (std::size_t k = 0; k < kBetas.size(); ++k) {
    if (std::abs(beta - kBetas[k]) <= 1e-9)
      return PronySeries(std::vector<PronyTerm>(kTable[k].begin(), kTable[k].end()));
  }
  std::ostringstream msg;
  msg << "no built-in Prony table for beta = " << beta << "; supported values are 3/7, 1/2, 3/5";
  throw NotFoundError(msg.str());
}

}  // namespace memstep
