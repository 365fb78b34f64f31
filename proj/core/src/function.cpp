#include "delaysl/function.hpp"

#include <algorithm>
#include <cmath>

namespace delaysl {

namespace {

// sin(w d) / w, equal to d at w = 0.
double sin_over(double w, double d) {
  const double wd = w * d;
  if (std::abs(wd) < 1e-4) return d * (1.0 - wd * wd / 6.0 + wd * wd * wd * wd / 120.0);
  return std::sin(wd) / w;
}

// P_0..P_{n-1} at t accumulated against coefficients.
double legendre_sum(const double* c, int n, double t) {
  if (n == 0) return 0.0;
  double p0 = 1.0, p1 = t;
  double s = c[0];
  if (n > 1) s += c[1] * t;
  for (int k = 1; k + 1 < n; ++k) {
    const double p2 = ((2.0 * k + 1.0) * t * p1 - k * p0) / (k + 1.0);
    s += c[k + 1] * p2;
    p0 = p1;
    p1 = p2;
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------- TrigSeries

TrigSeries::TrigSeries(double lo, double hi, std::vector<Term> terms, std::string label)
    : lo_(lo), hi_(hi), terms_(std::move(terms)), label_(std::move(label)) {
  if (!(hi > lo)) throw InvalidInput("TrigSeries: empty interval");
}

double TrigSeries::value(double x) const {
  const double u = (x - lo_) / (hi_ - lo_);
  double s = 0.0;
  for (const Term& t : terms_) s += t.coef * std::cos(t.freq * u + t.phase);
  return s;
}

double TrigSeries::derivative(double x) const {
  const double u = (x - lo_) / (hi_ - lo_);
  double s = 0.0;
  for (const Term& t : terms_) s -= t.coef * t.freq * std::sin(t.freq * u + t.phase);
  return s / (hi_ - lo_);
}

double TrigSeries::integral(double x0, double x1) const {
  const double len = hi_ - lo_;
  const double u0 = (x0 - lo_) / len, u1 = (x1 - lo_) / len;
  const double half = 0.5 * (u1 - u0), mid = 0.5 * (u0 + u1);
  // sin(A) - sin(B) = 2 cos((A+B)/2) sin((A-B)/2)
  double s = 0.0;
  for (const Term& t : terms_) s += t.coef * 2.0 * std::cos(t.freq * mid + t.phase) * sin_over(t.freq, half);
  return len * s;
}

TrigSeries TrigSeries::scaled(double c) const {
  std::vector<Term> t = terms_;
  for (Term& x : t) x.coef *= c;
  return TrigSeries(lo_, hi_, std::move(t), label_);
}

// ----------------------------------------------------------- SampledFunction

SampledFunction::SampledFunction(std::vector<double> breaks, int m, std::vector<double> values)
    : breaks_(std::move(breaks)), m_(m), values_(std::move(values)) {
  const std::size_t panels = breaks_.size() < 2 ? 0 : breaks_.size() - 1;
  if (panels == 0 || m_ < 1) throw InvalidInput("SampledFunction: need >= 1 panel and >= 1 point per panel");
  for (std::size_t p = 0; p < panels; ++p)
    if (!(breaks_[p + 1] > breaks_[p])) throw InvalidInput("SampledFunction: breaks must increase");
  if (values_.size() != panels * static_cast<std::size_t>(m_))
    throw InvalidInput("SampledFunction: expected " + std::to_string(panels * m_) + " samples");

  const QuadratureRule& g = gauss_legendre(m_);
  coef_.assign(panels * m_, 0.0);
  dcoef_.assign(panels * m_, 0.0);
  icoef_.assign(panels * (m_ + 1), 0.0);
  cumulative_.assign(panels + 1, 0.0);
  std::vector<double> pk(m_);
  for (std::size_t p = 0; p < panels; ++p) {
    double* c = &coef_[p * m_];
    for (int i = 0; i < m_; ++i) {
      const double t = g.nodes[i];
      double p0 = 1.0, p1 = t;
      pk[0] = 1.0;
      if (m_ > 1) pk[1] = t;
      for (int k = 1; k + 1 < m_; ++k) {
        const double p2 = ((2.0 * k + 1.0) * t * p1 - k * p0) / (k + 1.0);
        pk[k + 1] = p2;
        p0 = p1;
        p1 = p2;
      }
      const double fw = g.weights[i] * values_[p * m_ + i];
      for (int k = 0; k < m_; ++k) c[k] += fw * pk[k];
    }
    for (int k = 0; k < m_; ++k) c[k] *= 0.5 * (2.0 * k + 1.0);

    double* d = &dcoef_[p * m_];
    for (int j = 0; j < m_; ++j) {
      double s = 0.0;
      for (int k = j + 1; k < m_; k += 2) s += c[k];
      d[j] = (2.0 * j + 1.0) * s;
    }

    double* ic = &icoef_[p * (m_ + 1)];
    ic[0] += c[0];
    ic[1] += c[0];
    for (int k = 1; k < m_; ++k) {
      ic[k + 1] += c[k] / (2.0 * k + 1.0);
      ic[k - 1] -= c[k] / (2.0 * k + 1.0);
    }
    cumulative_[p + 1] = cumulative_[p] + (breaks_[p + 1] - breaks_[p]) * c[0];
  }
}

std::size_t SampledFunction::panel_of(double x) const {
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  const std::ptrdiff_t idx = (it - breaks_.begin()) - 1;
  const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(breaks_.size()) - 2;
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(idx, 0, last));
}

double SampledFunction::value(double x) const {
  const std::size_t p = panel_of(x);
  const double a = breaks_[p], b = breaks_[p + 1];
  const double t = (2.0 * x - a - b) / (b - a);
  return legendre_sum(&coef_[p * m_], m_, t);
}

double SampledFunction::derivative(double x) const {
  const std::size_t p = panel_of(x);
  const double a = breaks_[p], b = breaks_[p + 1];
  const double t = (2.0 * x - a - b) / (b - a);
  return legendre_sum(&dcoef_[p * m_], m_, t) * 2.0 / (b - a);
}

double SampledFunction::antiderivative(double x) const {
  const std::size_t p = panel_of(x);
  const double a = breaks_[p], b = breaks_[p + 1];
  const double t = (2.0 * x - a - b) / (b - a);
  return cumulative_[p] + 0.5 * (b - a) * legendre_sum(&icoef_[p * (m_ + 1)], m_ + 1, t);
}

double SampledFunction::integral(double x0, double x1) const { return antiderivative(x1) - antiderivative(x0); }

SampledFunction SampledFunction::scaled(double c) const {
  std::vector<double> v = values_;
  for (double& x : v) x *= c;
  return SampledFunction(breaks_, m_, std::move(v));
}

SampledFunction SampledFunction::remapped(double lo, double hi) const {
  std::vector<double> b = breaks_;
  const double l0 = breaks_.front(), l1 = breaks_.back();
  for (double& x : b) x = lo + (hi - lo) * (x - l0) / (l1 - l0);
  b.front() = lo;
  b.back() = hi;
  return SampledFunction(std::move(b), m_, values_);
}

// ------------------------------------------------------------ LinearFunction

LinearFunction::LinearFunction(double lo, double hi, double v_lo, double v_hi)
    : lo_(lo), hi_(hi), vlo_(v_lo), vhi_(v_hi) {
  if (!(hi > lo)) throw InvalidInput("LinearFunction: empty interval");
}

double LinearFunction::value(double x) const {
  const double u = (x - lo_) / (hi_ - lo_);
  return vlo_ + (vhi_ - vlo_) * u;
}

double LinearFunction::integral(double x0, double x1) const { return 0.5 * (value(x0) + value(x1)) * (x1 - x0); }

// ---------------------------------------------------- ProductIntegralFunction

ProductIntegralFunction::ProductIntegralFunction(std::shared_ptr<const RealFunction> h,
                                                 std::shared_ptr<const RealFunction> e, double shift)
    : h_(std::move(h)), e_(std::move(e)), shift_(shift) {
  if (!h_ || !e_) throw InvalidInput("ProductIntegralFunction: null descriptor");
  lo_ = e_->lo() + shift_;
  hi_ = e_->hi() + shift_;

  std::vector<double> interior;
  for (double b : e_->breaks()) interior.push_back(b + shift_);
  for (double b : h_->breaks()) interior.push_back(b - shift_);
  std::vector<double> brk = panel_breaks(lo_, hi_, interior, (hi_ - lo_) / 8.0);
  auto raw = [this](double x) {
    const double s = std::min(x + shift_, h_->hi());
    const double kernel = h_->integral(std::max(s, h_->lo()), h_->hi());
    return kernel * e_->integral(e_->lo(), x - shift_);
  };
  table_ = std::make_shared<const SampledFunction>(SampledFunction::from_function(raw, std::move(brk), 20));
}

double ProductIntegralFunction::value(double x) const {
  const double s = std::min(x + shift_, h_->hi());
  const double kernel = h_->integral(std::max(s, h_->lo()), h_->hi());
  return scale_ * kernel * e_->integral(e_->lo(), x - shift_);
}

double ProductIntegralFunction::derivative(double x) const {
  const double s = x + shift_;
  const double kernel = h_->integral(std::clamp(s, h_->lo(), h_->hi()), h_->hi());
  const double dkernel = (s >= h_->lo() && s <= h_->hi()) ? -h_->value(s) : 0.0;
  return scale_ * (dkernel * e_->integral(e_->lo(), x - shift_) + kernel * e_->value(x - shift_));
}

double ProductIntegralFunction::integral(double x0, double x1) const { return scale_ * table_->integral(x0, x1); }

ProductIntegralFunction ProductIntegralFunction::scaled(double c) const {
  ProductIntegralFunction out = *this;
  out.scale_ *= c;
  return out;
}

// -------------------------------------------------------------- RealFunction

double RealFunction::lo() const {
  return std::visit([](const auto& f) { return f.lo(); }, f_);
}
double RealFunction::hi() const {
  return std::visit([](const auto& f) { return f.hi(); }, f_);
}
double RealFunction::value(double x) const {
  return std::visit([x](const auto& f) { return f.value(x); }, f_);
}
double RealFunction::derivative(double x) const {
  return std::visit([x](const auto& f) { return f.derivative(x); }, f_);
}
double RealFunction::integral(double x0, double x1) const {
  return std::visit([=](const auto& f) { return f.integral(x0, x1); }, f_);
}
RealFunction RealFunction::scaled(double c) const {
  return std::visit([c](const auto& f) { return RealFunction(f.scaled(c)); }, f_);
}

std::vector<double> RealFunction::breaks() const {
  if (const auto* s = std::get_if<SampledFunction>(&f_)) {
    const auto& b = s->breaks();
    return {b.begin() + 1, b.end() - 1};
  }
  if (const auto* p = std::get_if<ProductIntegralFunction>(&f_)) {
    std::vector<double> out;
    for (double b : p->e().breaks()) out.push_back(b + p->shift());
    for (double b : p->h().breaks()) out.push_back(b - p->shift());
    return out;
  }
  return {};
}

}  // namespace delaysl
