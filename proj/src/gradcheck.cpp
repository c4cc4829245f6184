#include "deid/gradcheck.hpp"

#include <cmath>
#include <stdexcept>

namespace deid {

double finite_difference_check(
    const std::function<ag::Var(ag::Tape&)>& build,
    const std::vector<Parameter*>& params, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("finite_difference_check: eps <= 0");

  for (Parameter* p : params) p->zero_grad();
  {
    ag::Tape tape;
    ag::Var loss = build(tape);
    tape.backward(loss);
  }

  auto eval = [&]() {
    ag::Tape tape;
    return build(tape).value().scalar_value();
  };

  double worst = 0.0;
  for (Parameter* p : params) {
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double saved = p->value[i];
      p->value[i] = saved + eps;
      const double up = eval();
      p->value[i] = saved - eps;
      const double down = eval();
      p->value[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double analytic = p->grad[i];
      const double denom =
          std::max(1e-8, std::abs(analytic) + std::abs(numeric));
      worst = std::max(worst, std::abs(analytic - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace deid
