// Copyright 2026 The crblea Authors.
//
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

#include "crblea/problems.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace crblea {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;
// Open interval ends are pulled inward so that clipped candidates stay finite
// (tan near +-pi/2, log near 0).
constexpr double kOpenEdge = 1e-9;

void check_inputs(const ProblemSpec& p, const Vector& x_u, const Vector& x_l) {
  if (x_u.size() != p.m || x_l.size() != p.n) {
    std::ostringstream os;
    os << p.name << ": dimension mismatch (expected " << p.m << "+" << p.n << ", got "
       << x_u.size() << "+" << x_l.size() << ")";
    throw ContractViolation(os.str());
  }
  if (!p.upper_bounds.contains(x_u) || !p.lower_bounds.contains(x_l)) {
    throw ContractViolation(p.name + ": candidate outside bounds");
  }
}

Evaluation finish(const ProblemSpec& p, const char* level, LevelValue v, const Vector& x_u,
                  const Vector& x_l) {
  bool finite = std::isfinite(v.objective);
  for (double c : v.constraints) finite = finite && std::isfinite(c);
  if (!finite) {
    std::ostringstream os;
    os << p.name << ": non-finite " << level << " evaluation at x_u=[" << x_u.transpose()
       << "] x_l=[" << x_l.transpose() << "]";
    throw EvaluationError(os.str(), x_u, x_l);
  }
  Evaluation e;
  e.value = v.objective;
  e.violation = total_violation(v.constraints);
  e.feasible = e.violation == 0.0;
  e.constraints = std::move(v.constraints);
  return e;
}

// Decision-vector split shared by every SMD instance.
struct Split {
  int p = 0;  // x_u1
  int r = 0;  // x_u2 and x_l2
  int q = 0;  // x_l1 (SMD6: leading block of x_l1)
  int s = 0;  // SMD6 only: trailing, pairwise-coupled block of x_l1
};

struct Blocks {
  Vector u1, u2, l1, l2;
};

Blocks blocks(const Split& sp, const Vector& x_u, const Vector& x_l) {
  const int l1 = sp.q + sp.s;
  return {x_u.head(sp.p), x_u.tail(sp.r), x_l.head(l1), x_l.tail(sp.r)};
}

double sq(const Vector& v) { return v.squaredNorm(); }

double rosenbrock(const Vector& v) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i + 1 < v.size(); ++i) {
    const double a = v[i + 1] - v[i] * v[i];
    const double b = v[i] - 1.0;
    sum += a * a + b * b;
  }
  return sum;
}

double rastrigin_like(const Vector& v) {
  double sum = static_cast<double>(v.size());
  for (double x : v) sum += x * x - std::cos(2.0 * kPi * x);
  return sum;
}

Vector map(const Vector& v, double (*fn)(double)) {
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = fn(v[i]);
  return out;
}

double log1p_plain(double x) { return std::log(1.0 + x); }
double cube(double x) { return x * x * x; }

// x_j - sum_{i != j} x_i^3 - sum_k y_k^3 >= 0, returned in "<= 0" form.
void cubic_coupling(const Vector& x, const Vector& y, std::vector<double>& out) {
  const double y3 = map(y, cube).sum();
  const double x3 = map(x, cube).sum();
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double others = x3 - cube(x[j]);
    out.push_back(-(x[j] - others - y3));
  }
}

// Fractional-ring constraint: s - floor(s + 0.5) >= 0.
double ring(double s) { return -(s - std::floor(s + 0.5)); }

std::vector<Interval> repeat(int count, Interval iv) {
  return std::vector<Interval>(static_cast<std::size_t>(count), iv);
}

std::vector<Interval> concat(std::vector<Interval> a, const std::vector<Interval>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

Split split_for(int index, int m, int n) {
  Split sp;
  sp.r = m / 2;
  sp.p = m - sp.r;
  if (sp.r < 1) throw ConfigurationError("smd" + std::to_string(index) + ": m must be >= 2");
  const int rest = n - sp.r;
  if (index == 6) {
    sp.s = 2 * (rest / 2);
    sp.q = rest - sp.s;
    if (sp.s < 2) throw ConfigurationError("smd6: n - floor(m/2) must be >= 2");
  } else {
    sp.q = rest;
    const int q_min = (index == 5 || index == 8 || index == 10 || index == 12) ? 2 : 1;
    if (sp.q < q_min) {
      throw ConfigurationError("smd" + std::to_string(index) + ": n - floor(m/2) must be >= " +
                               std::to_string(q_min));
    }
  }
  return sp;
}

}  // namespace

double total_violation(const std::vector<double>& constraints) {
  double v = 0.0;
  for (double c : constraints) v += c > 0.0 ? c : 0.0;
  return v;
}

Evaluation evaluate_upper(const ProblemSpec& p, const Vector& x_u, const Vector& x_l,
                          EvalLedger& ledger) {
  check_inputs(p, x_u, x_l);
  ledger.count_upper();
  return finish(p, "upper", p.upper_eval(x_u, x_l), x_u, x_l);
}

Evaluation evaluate_lower(const ProblemSpec& p, const Vector& x_u, const Vector& x_l,
                          EvalLedger& ledger) {
  check_inputs(p, x_u, x_l);
  ledger.count_lower();
  return finish(p, "lower", p.lower_eval(x_u, x_l), x_u, x_l);
}

ProblemSpec make_smd(int index, int m, int n) {
  if (index < 1 || index > 12) {
    throw ConfigurationError("smd index must be in [1, 12], got " + std::to_string(index));
  }
  const Split sp = split_for(index, m, n);
  const int l1_dim = sp.q + sp.s;
  const Interval wide{-5.0, 10.0};
  const Interval half_pi{-kPi / 2 + kOpenEdge, kPi / 2 - kOpenEdge};

  ProblemSpec p;
  p.name = "smd" + std::to_string(index);
  p.m = m;
  p.n = n;

  Interval u2 = wide;
  Interval l2 = wide;
  switch (index) {
    case 1: case 3: case 10: l2 = half_pi; break;
    case 2: case 7: u2 = {-5.0, 1.0}; l2 = {kOpenEdge, kE}; break;
    case 4: u2 = {-1.0, 1.0}; l2 = {0.0, kE}; break;
    case 9: u2 = {-5.0, 1.0}; l2 = {-1.0 + kOpenEdge, -1.0 + kE}; break;
    case 11: u2 = {-1.0, 1.0}; l2 = {1.0 / kE, kE}; break;
    case 12: u2 = {-14.1, 14.1}; l2 = {-1.5, 1.5}; break;
    default: break;
  }
  p.upper_bounds = Bounds(concat(repeat(sp.p, wide), repeat(sp.r, u2)));
  p.lower_bounds = Bounds(concat(repeat(l1_dim, wide), repeat(sp.r, l2)));

  Vector opt_u = Vector::Zero(m);
  Vector opt_l = Vector::Zero(n);
  double F_r = 0.0;
  double f_r = 0.0;

  switch (index) {
    case 1:
      p.upper_eval = [sp](const Vector& xu, const Vector& xl) {
        auto b = blocks(sp, xu, xl);
        const Vector t = b.u2 - map(b.l2, std::tan);
        return LevelValue{sq(b.u1) + sq(b.l1) + sq(b.u2) + sq(t), {}};
      };
      p.lower_eval = [sp](const Vector& xu, const Vector& xl) {
        auto b = blocks(sp, xu, xl);
        const Vector t = b.u2 - map(b.l2, std::tan);
        return LevelValue{sq(b.u1) + sq(b.l1) + sq(t), {}};
      };
      break;
    case 2:
      p.upper_eval = [sp](const Vector& xu, const Vector& xl) {
        auto b = blocks(sp, xu, xl);
        const Vector t = b.u2 - map(b.l2, std::log);
        return LevelValue{sq(b.u1) - sq(b.l1) + sq(b.u2) - sq(t), {}};
      };
      p.lower_eval = [sp](const Vector& xu, const Vector& xl) {
        auto b = blocks(sp, xu, xl);
        const Vector t = b.u2 - map(b.l2, std::log);
        return LevelValue{sq(b.u1) + sq(b.l1) + sq(t), {}};
      };
      opt_l.tail(sp.r).setOnes();
      break;
    case 3:
      p.upper_eval = [sp](const Vector& xu, const Vector& xl) {
        auto b = blocks(sp, xu, xl);
        const Vector t = b.u2.array().square().matrix() - map(b.l2, std::tan);
        return LevelValue{sq(b.u1) + sq(b.l1) + sq(b.u2) + sq(t), {}};
      };
      p.lower_eval = [sp](const Vector& xu, const Vector& xl) {
        auto b = blocks(sp, xu, xl);
        const Vector t = b.u2.array().square().matrix() - map(b.l2, std::tan);
        return LevelValue{sq(b.u1) + rastrigin_like(b.l1) + sq(t), {}};
      };
      break;
    case 4:
      p.upper_eval = [sp](const Vector& xu, const Vector& xl) {
        auto b = blocks(sp, xu, xl);
        const Vector t = b.u2.cwiseAbs() - map(b.l2, log1p_plain);
        return LevelValue{sq(b.u1) - sq(b.l1) + sq(b.u2) - sq(t), {}};
      };
      p.lower_eval = [sp](const Vector& xu, const Vector& xl) {
        auto b = blocks(sp, xu, xl);
        const Vector t = b.u2.cwiseAbs() - map(b.l2, log1p_plain);
        return LevelValue{sq(b.u1) + rastrigin_like(b.l1) + sq(t), {}};
      };
      break;
    case 5:
      p.upper_eval = [sp](const Vector& xu, const Vector& xl) {
        auto b = blocks(sp, xu, xl);
        const Vector t = b.u2.cwiseAbs() - b.l2.array().square().matrix();
        return LevelValue{sq(b.u1) - rosenbrock(b.l1) + sq(b.u2) - sq(t), {}};
      };
      p.lower_eval = [sp](const Vector& xu, const Vector& xl) {
        auto b = blocks(sp, xu, xl);
        const Vector t = b.u2.cwiseAbs() - b.l2.array().square().matrix();
        return LevelValue{sq(b.u1) + rosenbrock(b.l1) + sq(t), {}};
      };
      opt_l.head(l1_dim).setOnes();
      break;
    case 6:
      p.upper_eval = [sp](const Vector& xu, const Vector& xl) {
        auto b = blocks(sp, xu, xl);
        const Vector t = b.u2 - b.l2;
        const double F2 = -sq(b.l1.head(sp.q)) + sq(b.l1.tail(sp.s));
        return LevelValue{sq(b.u1) + F2 + sq(b.u2) - sq(t), {}};
      };
      p.lower_eval = [sp](const Vector& xu, const Vector& xl) {
        auto b = blocks(sp, xu, xl);
        const Vector t = b.u2 - b.l2;
        double f2 = sq(b.l1.head(sp.q));
        for (int i = sp.q; i + 1 < sp.q + sp.s; i += 2) {
          const double d = b.l1[i + 1] - b.l1[i];
          f2 += d * d;
        }
        return LevelValue{sq(b.u1) + f2 + sq(t), {}};
      };
      break;
    case 7:
      p.upper_eval = [sp](const Vector& xu, const Vector& xl) {
        auto b = blocks(sp, xu, xl);
        double prod = 1.0;
        for (int i = 0; i < sp.p; ++i) prod *= std::cos(b.u1[i] / std::sqrt(i + 1.0));
        const double F1 = 1.0 + sq(b.u1) / 400.0 - prod;
        const Vector t = b.u2 - map(b.l2, std::log);
        return LevelValue{F1 - sq(b.l1) + sq(b.u2) - sq(t), {}};
      };
      p.lower_eval = [sp](const Vector& xu, const Vector& xl) {
        auto b = blocks(sp, xu, xl);
        const Vector t = b.u2 - map(b.l2, std::log);
        return LevelValue{map(b.u1, cube).sum() + sq(b.l1) + sq(t), {}};
      };
      opt_l.tail(sp.r).setOnes();
      break;
    case 8:
      p.upper_eval = [sp](const Vector& xu, const Vector& xl) {
        auto b = blocks(sp, xu, xl);
        const double inv_p = 1.0 / sp.p;
        double cos_sum = 0.0;
        for (double x : b.u1) cos_sum += std::cos(2.0 * kPi * x);
        const double F1 = 20.0 + kE - 20.0 * std::exp(-0.2 * std::sqrt(inv_p * sq(b.u1))) -
                          std::exp(inv_p * cos_sum);
        const Vector t = b.u2 - map(b.l2, cube);
        return LevelValue{F1 - rosenbrock(b.l1) + sq(b.u2) - sq(t), {}};
      };
      p.lower_eval = [sp](const Vector& xu, const Vector& xl) {
        auto b = blocks(sp, xu, xl);
        const Vector t = b.u2 - map(b.l2, cube);
        return LevelValue{b.u1.cwiseAbs().sum() + rosenbrock(b.l1) + sq(t), {}};
      };
      opt_l.head(l1_dim).setOnes();
      break;
    case 9:
      p.upper_constraints = 1;
      p.lower_constraints = 1;
      p.upper_eval = [sp](const Vector& xu, const Vector& xl) {
        auto b = blocks(sp, xu, xl);
        const Vector t = b.u2 - map(b.l2, log1p_plain);
        return LevelValue{sq(b.u1) - sq(b.l1) + sq(b.u2) - sq(t), {ring(sq(b.u1) + sq(b.u2))}};
      };
      p.lower_eval = [sp](const Vector& xu, const Vector& xl) {
        auto b = blocks(sp, xu, xl);
        const Vector t = b.u2 - map(b.l2, log1p_plain);
        return LevelValue{sq(b.u1) + sq(b.l1) + sq(t), {ring(sq(b.l1) + sq(b.l2))}};
      };
      break;
    case 10:
      p.upper_constraints = sp.p + sp.r;
      p.lower_constraints = sp.q;
      p.upper_eval = [sp](const Vector& xu, const Vector& xl) {
        auto b = blocks(sp, xu, xl);
        const Vector t = b.u2 - map(b.l2, std::tan);
        const double F = (b.u1.array() - 2.0).square().sum() + sq(b.l1) +
                         (b.u2.array() - 2.0).square().sum() - sq(t);
        LevelValue v{F, {}};
        cubic_coupling(b.u1, b.u2, v.constraints);
        cubic_coupling(b.u2, b.u1, v.constraints);
        return v;
      };
      p.lower_eval = [sp](const Vector& xu, const Vector& xl) {
        auto b = blocks(sp, xu, xl);
        const Vector t = b.u2 - map(b.l2, std::tan);
        LevelValue v{sq(b.u1) + (b.l1.array() - 2.0).square().sum() + sq(t), {}};
        cubic_coupling(b.l1, Vector(), v.constraints);
        return v;
      };
      opt_u.setConstant(1.0 / std::sqrt(sp.p + sp.r - 1.0));
      opt_l.head(l1_dim).setConstant(1.0 / std::sqrt(sp.q - 1.0));
      for (int i = 0; i < sp.r; ++i) opt_l[l1_dim + i] = std::atan(opt_u[sp.p + i]);
      break;
    case 11:
      p.upper_constraints = sp.r;
      p.lower_constraints = 1;
      p.upper_eval = [sp](const Vector& xu, const Vector& xl) {
        auto b = blocks(sp, xu, xl);
        const Vector logl = map(b.l2, std::log);
        LevelValue v{sq(b.u1) - sq(b.l1) + sq(b.u2) - sq(b.u2 - logl), {}};
        const double shift = 1.0 / std::sqrt(static_cast<double>(sp.r));
        for (int i = 0; i < sp.r; ++i) v.constraints.push_back(-(b.u2[i] - shift - logl[i]));
        return v;
      };
      p.lower_eval = [sp](const Vector& xu, const Vector& xl) {
        auto b = blocks(sp, xu, xl);
        const double t = sq(b.u2 - map(b.l2, std::log));
        return LevelValue{sq(b.u1) + sq(b.l1) + t, {-(t - 1.0)}};
      };
      opt_l.tail(sp.r).setConstant(std::exp(-1.0 / std::sqrt(static_cast<double>(sp.r))));
      break;
    case 12:
      p.upper_constraints = sp.r + sp.p + sp.r;
      p.lower_constraints = 1 + sp.q;
      p.upper_eval = [sp](const Vector& xu, const Vector& xl) {
        auto b = blocks(sp, xu, xl);
        const Vector tanl = map(b.l2, std::tan);
        const Vector t = b.u2 - tanl;
        const double F = (b.u1.array() - 2.0).square().sum() + sq(b.l1) +
                         (b.u2.array() - 2.0).square().sum() +
                         map(b.l2.cwiseAbs(), std::tan).sum() - sq(t);
        LevelValue v{F, {}};
        for (int i = 0; i < sp.r; ++i) v.constraints.push_back(-(b.u2[i] - tanl[i]));
        cubic_coupling(b.u1, b.u2, v.constraints);
        cubic_coupling(b.u2, b.u1, v.constraints);
        return v;
      };
      p.lower_eval = [sp](const Vector& xu, const Vector& xl) {
        auto b = blocks(sp, xu, xl);
        const double t = sq(b.u2 - map(b.l2, std::tan));
        LevelValue v{sq(b.u1) + (b.l1.array() - 2.0).square().sum() + t, {-(t - 1.0)}};
        cubic_coupling(b.l1, Vector(), v.constraints);
        return v;
      };
      opt_u.setConstant(1.0 / std::sqrt(sp.p + sp.r - 1.0));
      opt_l.head(l1_dim).setConstant(1.0 / std::sqrt(sp.q - 1.0));
      for (int i = 0; i < sp.r; ++i) opt_l[l1_dim + i] = std::atan(opt_u[sp.p + i] - 1.0);
      break;
    default:
      break;
  }

  if (index == 10) {
    F_r = 4.0;
    f_r = 3.0;
  } else if (index == 11) {
    F_r = -1.0;
    f_r = 1.0;
  } else if (index == 12) {
    F_r = 3.0;
    f_r = 4.0;
  }
  p.optimum = {F_r, f_r, opt_u, opt_l};
  return p;
}

ProblemSpec make_toy(const std::string& variant, int m, const Vector& a, const Vector& c) {
  if (m < 1) throw ContractViolation("toy problem needs m >= 1");
  if (a.size() != m || c.size() != m) {
    throw ContractViolation("toy problem: a and c must have dimension m");
  }
  ProblemSpec p;
  p.name = variant;
  p.m = m;
  p.n = m;
  std::vector<Interval> upper;
  std::vector<Interval> lower;
  for (int i = 0; i < m; ++i) {
    upper.push_back({-5.0, 5.0});
    lower.push_back({-5.0 + c[i], 5.0 + c[i]});
  }
  p.upper_bounds = Bounds(std::move(upper));
  p.lower_bounds = Bounds(std::move(lower));
  p.upper_eval = [a](const Vector& xu, const Vector& xl) {
    return LevelValue{(xu - a).squaredNorm() + xl.squaredNorm(), {}};
  };
  p.lower_eval = [c](const Vector& xu, const Vector& xl) {
    return LevelValue{(xl - xu - c).squaredNorm(), {}};
  };
  const Vector xu_star = (a - c) / 2.0;
  const Vector xl_star = xu_star + c;
  p.optimum = {(xu_star - a).squaredNorm() + xl_star.squaredNorm(), 0.0, xu_star, xl_star};
  return p;
}

ProblemSpec make_problem(const std::string& name, int m, int n) {
  if (name == "tq") {
    if (m != n) throw ConfigurationError("tq: requires m == n");
    return make_toy("tq", m, Vector::Zero(m), Vector::Zero(m));
  }
  if (name.rfind("smd", 0) == 0 && name.size() > 3) {
    int index = 0;
    try {
      std::size_t used = 0;
      index = std::stoi(name.substr(3), &used);
      if (used != name.size() - 3) index = 0;
    } catch (const std::exception&) {
      index = 0;
    }
    if (index >= 1) return make_smd(index, m, n);
  }
  throw ConfigurationError("unknown problem '" + name + "'");
}

std::vector<std::string> problem_names() {
  std::vector<std::string> names;
  for (int i = 1; i <= 12; ++i) names.push_back("smd" + std::to_string(i));
  names.push_back("tq");
  return names;
}

std::string problem_fingerprint(const ProblemSpec& p) {
  std::ostringstream os;
  os.precision(17);
  os << p.name << ";m=" << p.m << ";n=" << p.n << ";J=" << p.upper_constraints
     << ";I=" << p.lower_constraints << ";Fr=" << p.optimum.F << ";fr=" << p.optimum.f << ";u=";
  for (const auto& iv : p.upper_bounds.intervals()) os << iv.low << ":" << iv.high << ",";
  os << ";l=";
  for (const auto& iv : p.lower_bounds.intervals()) os << iv.low << ":" << iv.high << ",";
  return os.str();
}

}  // namespace crblea
