#include "umlab/symbols.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "umlab/errors.hpp"

namespace umlab {

Vec normalize_direction(const Vec& xi) {
  const double m = xi.cwiseAbs().maxCoeff();
  if (!(m > 0.0) || !std::isfinite(m))
    throw DomainError("symbol is undefined at the origin (or at a non-finite point)");
  int e = 0;
  std::frexp(m, &e);
  Vec scaled(xi.size());
  for (Eigen::Index i = 0; i < xi.size(); ++i) scaled(i) = std::ldexp(xi(i), -e);
  return scaled / scaled.norm();
}

Symbol::Symbol(int dimension, std::string name, SphereFn on_sphere)
    : Symbol(dimension, std::move(name), std::move(on_sphere), nullptr, nullptr) {}

Symbol::Symbol(int dimension, std::string name, SphereFn on_sphere, GradientFn gradient,
               HessianFn hessian) {
  if (dimension < 2 || dimension > kMaxDim)
    throw InvalidArgument("symbol dimension must be in [2, " + std::to_string(kMaxDim) + "]");
  if (!on_sphere) throw InvalidArgument("symbol needs an evaluator");
  if (static_cast<bool>(gradient) != static_cast<bool>(hessian))
    throw InvalidArgument("analytic symbols need both gradient and Hessian");
  impl_ = std::make_shared<const Impl>(Impl{dimension, std::move(name), std::move(on_sphere),
                                            std::move(gradient), std::move(hessian)});
}

double Symbol::eval(const Vec& xi) const {
  if (xi.size() != dimension())
    throw InvalidArgument("expected a " + std::to_string(dimension()) + "-vector");
  return impl_->on_sphere(normalize_direction(xi));
}

std::optional<Vec> Symbol::gradient(const Vec& xi) const {
  if (!impl_->gradient) return std::nullopt;
  if (!(xi.norm() > 0.0)) throw DomainError("symbol gradient is undefined at the origin");
  return impl_->gradient(xi);
}

std::optional<Mat> Symbol::hessian(const Vec& xi) const {
  if (!impl_->hessian) return std::nullopt;
  if (!(xi.norm() > 0.0)) throw DomainError("symbol Hessian is undefined at the origin");
  return impl_->hessian(xi);
}

Symbol Symbol::composed_with(const Mat& rotation, std::string name) const {
  auto base = *this;
  const Mat r = rotation;
  SphereFn f = [base, r](const Vec& w) { return base.eval(r * w); };
  if (!has_analytic_derivatives()) return Symbol(dimension(), std::move(name), std::move(f));
  GradientFn g = [base, r](const Vec& xi) -> Vec { return r.transpose() * *base.gradient(r * xi); };
  HessianFn h = [base, r](const Vec& xi) -> Mat {
    return r.transpose() * *base.hessian(r * xi) * r;
  };
  return Symbol(dimension(), std::move(name), std::move(f), std::move(g), std::move(h));
}

Symbol Symbol::negated() const {
  auto base = *this;
  const std::string n = "-(" + name() + ")";
  SphereFn f = [base](const Vec& w) { return -base.eval_unit(w); };
  if (!has_analytic_derivatives()) return Symbol(dimension(), n, std::move(f));
  GradientFn g = [base](const Vec& xi) -> Vec { return -*base.gradient(xi); };
  HessianFn h = [base](const Vec& xi) -> Mat { return -*base.hessian(xi); };
  return Symbol(dimension(), n, std::move(f), std::move(g), std::move(h));
}

// ---------------------------------------------------------------------------

namespace {

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

struct Polynomial {
  int dim;
  std::vector<MonomialTerm> terms;

  double value(const Vec& w) const {
    double s = 0.0;
    for (const auto& t : terms) {
      double m = t.coefficient;
      for (int i = 0; i < dim; ++i) m *= ipow(w(i), t.powers[i]);
      s += m;
    }
    return s;
  }

  Vec gradient(const Vec& w) const {
    Vec g = Vec::Zero(dim);
    for (const auto& t : terms) {
      for (int i = 0; i < dim; ++i) {
        if (t.powers[i] == 0) continue;
        double m = t.coefficient * t.powers[i] * ipow(w(i), t.powers[i] - 1);
        for (int j = 0; j < dim; ++j)
          if (j != i) m *= ipow(w(j), t.powers[j]);
        g(i) += m;
      }
    }
    return g;
  }

  Mat hessian(const Vec& w) const {
    Mat h = Mat::Zero(dim, dim);
    for (const auto& t : terms) {
      for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j) {
          std::vector<int> p = t.powers;
          double c = t.coefficient * p[i];
          if (c == 0.0) continue;
          p[i] -= 1;
          c *= p[j];
          if (c == 0.0) continue;
          p[j] -= 1;
          double m = c;
          for (int k = 0; k < dim; ++k) m *= ipow(w(k), p[k]);
          h(i, j) += m;
          if (j != i) h(j, i) += m;
        }
      }
    }
    return h;
  }
};

}  // namespace

Symbol spherical_polynomial(int dimension, std::vector<MonomialTerm> terms, std::string name) {
  if (dimension < 2 || dimension > kMaxDim)
    throw InvalidArgument("symbol dimension must be in [2, " + std::to_string(kMaxDim) + "]");
  for (const auto& t : terms) {
    if (static_cast<int>(t.powers.size()) != dimension)
      throw InvalidArgument("monomial power list must have d entries");
    int deg = 0;
    for (int p : t.powers) {
      if (p < 0) throw InvalidArgument("negative monomial power");
      deg += p;
    }
    if (deg > 8) throw InvalidArgument("spherical polynomial degree above 8 is not supported");
  }
  auto poly = std::make_shared<const Polynomial>(Polynomial{dimension, std::move(terms)});

  auto value = [poly](const Vec& w) { return poly->value(w); };
  auto gradient = [poly](const Vec& xi) -> Vec {
    const double r = xi.norm();
    const Vec w = xi / r;
    const Vec g = poly->gradient(w);
    return (g - w * w.dot(g)) / r;
  };
  // H = (P Hp P - (w.g) P - w (Pg)^T - (Pg) w^T) / r^2 with P = I - w w^T.
  auto hessian = [poly](const Vec& xi) -> Mat {
    const double r = xi.norm();
    const Vec w = xi / r;
    const Vec g = poly->gradient(w);
    const Mat hp = poly->hessian(w);
    const Mat proj = Mat::Identity(w.size(), w.size()) - w * w.transpose();
    const Vec pg = proj * g;
    Mat h = proj * hp * proj - w.dot(g) * proj - w * pg.transpose() - pg * w.transpose();
    return h / (r * r);
  };
  return Symbol(dimension, std::move(name), value, gradient, hessian);
}

Symbol riesz(int dimension, int axis, int sign) {
  if (axis < 1 || axis > dimension)
    throw InvalidArgument("riesz axis must be in 1..d");
  if (sign != 1 && sign != -1) throw InvalidArgument("riesz sign must be +1 or -1");
  std::vector<int> p(static_cast<std::size_t>(dimension), 0);
  p[static_cast<std::size_t>(axis - 1)] = 1;
  return spherical_polynomial(dimension, {{static_cast<double>(sign), p}},
                              "riesz:" + std::to_string(sign * axis));
}

Symbol constant_symbol(int dimension, double value) {
  std::ostringstream name;
  name << "constant:" << value;
  std::vector<MonomialTerm> terms;
  if (value != 0.0) terms.push_back({value, std::vector<int>(static_cast<std::size_t>(dimension), 0)});
  return spherical_polynomial(dimension, std::move(terms), name.str());
}

Symbol quadratic_symbol(std::vector<double> weights) {
  const int d = static_cast<int>(weights.size());
  std::vector<MonomialTerm> terms;
  std::ostringstream name;
  name << "quadratic:";
  for (int k = 0; k < d; ++k) {
    std::vector<int> p(weights.size(), 0);
    p[static_cast<std::size_t>(k)] = 2;
    terms.push_back({weights[static_cast<std::size_t>(k)], p});
    name << (k ? "," : "") << weights[static_cast<std::size_t>(k)];
  }
  return spherical_polynomial(d, std::move(terms), name.str());
}

namespace {

double parse_double(const std::string& s, const std::string& id) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("malformed number in symbol id '" + id + "'");
  }
}

}  // namespace

Symbol symbol_from_id(const std::string& id, int dimension) {
  const auto colon = id.find(':');
  const std::string kind = id.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : id.substr(colon + 1);
  if (kind == "riesz") {
    if (arg.empty()) throw InvalidArgument("riesz needs an axis, e.g. riesz:1");
    const double k = parse_double(arg, id);
    if (k != std::round(k) || k == 0) throw InvalidArgument("riesz axis must be a nonzero integer");
    const int axis = static_cast<int>(std::abs(k));
    return riesz(dimension, axis, k > 0 ? 1 : -1);
  }
  if (kind == "constant") {
    return constant_symbol(dimension, arg.empty() ? 0.0 : parse_double(arg, id));
  }
  if (kind == "quadratic") {
    std::vector<double> w;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) w.push_back(parse_double(item, id));
    if (static_cast<int>(w.size()) != dimension)
      throw InvalidArgument("quadratic symbol needs exactly d weights");
    return quadratic_symbol(std::move(w));
  }
  throw InvalidArgument("unknown symbol id '" + id + "'");
}

Symbol symbol_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("symbol JSON: ") + e.what());
  }
  if (!j.contains("d") || !j.contains("terms"))
    throw InvalidArgument("symbol JSON needs 'd' and 'terms'");
  const int d = j.at("d").get<int>();
  std::vector<MonomialTerm> terms;
  for (const auto& t : j.at("terms")) {
    MonomialTerm m;
    m.coefficient = t.at("coef").get<double>();
    m.powers = t.at("powers").get<std::vector<int>>();
    terms.push_back(std::move(m));
  }
  return spherical_polynomial(d, std::move(terms), j.value("name", std::string("custom")));
}

// ---------------------------------------------------------------------------

ChartPhase::ChartPhase(int dimension, ValueFn value, GradientFn gradient, HessianFn hessian)
    : dim_(dimension), value_(std::move(value)), gradient_(std::move(gradient)),
      hessian_(std::move(hessian)) {
  if (dimension < 1 || dimension > kMaxDim) throw InvalidArgument("chart dimension out of range");
  if (!value_ || !gradient_ || !hessian_) throw InvalidArgument("chart phase needs all three maps");
}

ChartPhase ChartPhase::finite_difference(int dimension, ValueFn value) {
  auto g = [value](const Vec& u) { return fd_gradient(value, u); };
  auto h = [value](const Vec& u) { return fd_hessian(value, u); };
  ChartPhase c(dimension, value, g, h);
  c.analytic_ = false;
  return c;
}

Vec fd_gradient(const ChartPhase::ValueFn& f, const Vec& u) {
  const double h = 1e-5 * (1.0 + u.norm());
  Vec g(u.size());
  Vec p = u;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    p(i) = u(i) + h;
    const double fp = f(p);
    p(i) = u(i) - h;
    const double fm = f(p);
    p(i) = u(i);
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

Mat fd_hessian(const ChartPhase::ValueFn& f, const Vec& u) {
  const double h = 1e-4 * (1.0 + u.norm());
  const Eigen::Index n = u.size();
  Mat hess(n, n);
  const double f0 = f(u);
  Vec p = u;
  for (Eigen::Index i = 0; i < n; ++i) {
    p(i) = u(i) + h;
    const double fp = f(p);
    p(i) = u(i) - h;
    const double fm = f(p);
    p(i) = u(i);
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      auto at = [&](double si, double sj) {
        p(i) = u(i) + si * h;
        p(j) = u(j) + sj * h;
        const double v = f(p);
        p(i) = u(i);
        p(j) = u(j);
        return v;
      };
      const double mixed = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
      hess(i, j) = mixed;
      hess(j, i) = mixed;
    }
  }
  return hess;
}

Vec cap_embed(const Vec& u, int axis, int sign) {
  Vec xi(u.size() + 1);
  for (Eigen::Index i = 0, k = 0; i < xi.size(); ++i) xi(i) = (i == axis) ? sign : u(k++);
  return xi;
}

namespace {

Vec drop_index(const Vec& v, int axis) {
  Vec out(v.size() - 1);
  for (Eigen::Index i = 0, k = 0; i < v.size(); ++i)
    if (i != axis) out(k++) = v(i);
  return out;
}

Mat drop_row_col(const Mat& m, int axis) {
  Mat out(m.rows() - 1, m.cols() - 1);
  for (Eigen::Index i = 0, ki = 0; i < m.rows(); ++i) {
    if (i == axis) continue;
    for (Eigen::Index j = 0, kj = 0; j < m.cols(); ++j) {
      if (j == axis) continue;
      out(ki, kj++) = m(i, j);
    }
    ++ki;
  }
  return out;
}

}  // namespace

ChartPhase cap_chart(const Symbol& sym, int axis, int sign) {
  const int d = sym.dimension();
  if (axis < 0 || axis >= d) throw InvalidArgument("cap axis out of range");
  if (sign != 1 && sign != -1) throw InvalidArgument("cap sign must be +1 or -1");
  ChartPhase::ValueFn value = [sym, axis, sign](const Vec& u) {
    return sym.eval(cap_embed(u, axis, sign));
  };
  if (!sym.has_analytic_derivatives()) return ChartPhase::finite_difference(d - 1, value);
  auto gradient = [sym, axis, sign](const Vec& u) {
    return drop_index(*sym.gradient(cap_embed(u, axis, sign)), axis);
  };
  auto hessian = [sym, axis, sign](const Vec& u) {
    return drop_row_col(*sym.hessian(cap_embed(u, axis, sign)), axis);
  };
  return ChartPhase(d - 1, value, gradient, hessian);
}

ChartPhase chart_phase(const Symbol& sym) { return cap_chart(sym, sym.dimension() - 1, +1); }

Mat pole_rotation(const Vec& p) {
  const Eigen::Index d = p.size();
  Vec v = -p;
  v(d - 1) += 1.0;
  const double vv = v.squaredNorm();
  if (vv == 0.0) return Mat::Identity(d, d);
  return Mat::Identity(d, d) - (2.0 / vv) * v * v.transpose();
}

Symbol rotate_to_pole(const Symbol& sym, const Vec& p) {
  if (p.size() != sym.dimension()) throw InvalidArgument("pole must be a d-vector");
  if (std::abs(p.norm() - 1.0) > 1e-10) throw DomainError("pole must be a unit vector");
  return sym.composed_with(pole_rotation(p / p.norm()), sym.name() + "@pole");
}

}  // namespace umlab
