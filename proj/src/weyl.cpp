// SPDX-License-Identifier: Apache-2.0
#include "toralrig/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <Eigen/SVD>

#include "toralrig/error.hpp"

namespace toralrig {

namespace {

bool positively_proportional(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  double nx = x.norm(), ny = y.norm();
  if (nx == 0.0 || ny == 0.0) return nx == ny;
  return (x / nx - y / ny).norm() < kProportionalityTol;
}

bool negatively_proportional(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return positively_proportional(x, -y) && x.norm() > 0.0;
}

bool proportional(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return positively_proportional(x, y) || negatively_proportional(x, y);
}

Eigen::VectorXd canonical_normal(const Eigen::VectorXd& chi, int& orientation) {
  Eigen::VectorXd n = chi.normalized();
  orientation = 1;
  for (Eigen::Index i = 0; i < n.size(); ++i) {
    if (std::abs(n(i)) > 1e-12) {
      if (n(i) < 0) {
        n = -n;
        orientation = -1;
      }
      break;
    }
  }
  return n;
}

int rank_of(const Eigen::MatrixXd& m, double tol = 1e-9) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  int r = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol) ++r;
  return r;
}

void combinations(int n, int r, std::vector<int>& current, int start, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == r) {
    out.push_back(current);
    return;
  }
  for (int i = start; i < n; ++i) {
    current.push_back(i);
    combinations(n, r, current, i + 1, out);
    current.pop_back();
  }
}

// One point in every region of the central arrangement with the given normals.
std::vector<Eigen::VectorXd> region_points(const std::vector<Eigen::VectorXd>& normals, int dim) {
  if (normals.empty()) return {Eigen::VectorXd::Zero(dim)};
  Eigen::MatrixXd n(normals.size(), dim);
  for (std::size_t i = 0; i < normals.size(); ++i) n.row(i) = normals[i].transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(n, Eigen::ComputeFullV);
  int r = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-9 * svd.singularValues()(0)) ++r;
  Eigen::MatrixXd q = svd.matrixV().leftCols(r);
  Eigen::MatrixXd p = n * q;
  if (r == 1) return {q.col(0), -q.col(0)};

  std::vector<Eigen::VectorXd> reduced;
  std::vector<std::vector<int>> subsets;
  std::vector<int> scratch;
  combinations(static_cast<int>(normals.size()), r - 1, scratch, 0, subsets);
  for (const auto& subset : subsets) {
    Eigen::MatrixXd sub(subset.size(), r);
    for (std::size_t t = 0; t < subset.size(); ++t) sub.row(t) = p.row(subset[t]).normalized();
    Eigen::JacobiSVD<Eigen::MatrixXd> ssvd(sub, Eigen::ComputeFullV);
    if (rank_of(sub) < r - 1) continue;
    Eigen::VectorXd rho = ssvd.matrixV().col(r - 1);
    for (int s : {1, -1}) {
      Eigen::VectorXd ray = s * rho;
      std::vector<Eigen::VectorXd> local;
      double margin = INFINITY;
      for (Eigen::Index j = 0; j < p.rows(); ++j) {
        Eigen::VectorXd pj = p.row(j).transpose();
        double v = pj.dot(ray) / pj.norm();
        if (std::abs(v) < 1e-9)
          local.push_back(pj - pj.dot(ray) * ray);
        else
          margin = std::min(margin, std::abs(v));
      }
      for (const auto& w : region_points(local, r)) {
        double wn = w.norm();
        double delta = wn > 0 && std::isfinite(margin) ? 0.5 * margin / wn : (wn > 0 ? 0.5 / wn : 0.0);
        reduced.push_back(ray + delta * w);
      }
    }
  }
  std::vector<Eigen::VectorXd> out;
  for (const auto& v : reduced) out.push_back(q * v);
  return out;
}

std::vector<int> sign_vector(const std::vector<Hyperplane>& hyperplanes, const Eigen::VectorXd& a, bool& regular) {
  std::vector<int> signs(hyperplanes.size());
  regular = true;
  const double scale = a.norm();
  for (std::size_t h = 0; h < hyperplanes.size(); ++h) {
    double v = hyperplanes[h].normal.dot(a);
    if (std::abs(v) <= 1e-9 * scale) regular = false;
    signs[h] = v > 0 ? 1 : -1;
  }
  return signs;
}

}  // namespace

std::vector<CoarseClass> coarse_classes(const LyapunovSpectrum& spectrum) {
  std::vector<CoarseClass> classes;
  for (int i = 0; i < spectrum.size(); ++i) {
    const auto& chi = spectrum.spaces[i].functional;
    bool placed = false;
    for (auto& c : classes) {
      if (positively_proportional(spectrum.spaces[c.members.front()].functional, chi)) {
        c.members.push_back(i);
        c.dimension += spectrum.spaces[i].dim();
        placed = true;
        break;
      }
    }
    if (!placed) {
      CoarseClass c;
      c.members = {i};
      c.direction = chi.norm() > 0 ? Eigen::VectorXd(chi.normalized()) : chi;
      c.dimension = spectrum.spaces[i].dim();
      classes.push_back(std::move(c));
    }
  }
  return classes;
}

long long max_chamber_count(int hyperplanes, int k) {
  long long total = 0;
  for (int i = 0; i < k; ++i) {
    long long binom = 1;
    for (int t = 0; t < i; ++t) binom = binom * (hyperplanes - 1 - t) / (t + 1);
    if (i > hyperplanes - 1) binom = 0;
    total += binom;
  }
  return 2 * total;
}

std::vector<int> WeylChamberDecomposition::functional_signs(const Chamber& chamber) const {
  std::vector<int> out(functional_hyperplane.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = functional_orientation[i] * chamber.signs[functional_hyperplane[i]];
  return out;
}

int WeylChamberDecomposition::locate(const Eigen::VectorXd& a) const {
  bool regular = false;
  std::vector<int> s = sign_vector(hyperplanes, a, regular);
  if (!regular) return -1;
  for (std::size_t c = 0; c < chambers.size(); ++c)
    if (chambers[c].signs == s) return static_cast<int>(c);
  return -1;
}

WeylChamberDecomposition chambers(const LyapunovSpectrum& spectrum, int search_bound, bool require_representatives) {
  WeylChamberDecomposition dec;
  dec.rank = spectrum.rank;
  dec.search_bound = search_bound;
  dec.classes = coarse_classes(spectrum);
  bool any_nonzero = false;
  for (int i = 0; i < spectrum.size(); ++i) {
    const auto& chi = spectrum.spaces[i].functional;
    if (chi.norm() == 0.0) {
      dec.functional_hyperplane.push_back(-1);
      dec.functional_orientation.push_back(0);
      continue;
    }
    any_nonzero = true;
    int orientation = 1;
    Eigen::VectorXd n = canonical_normal(chi, orientation);
    int index = -1;
    for (std::size_t h = 0; h < dec.hyperplanes.size(); ++h)
      if ((dec.hyperplanes[h].normal - n).norm() < kProportionalityTol) index = static_cast<int>(h);
    if (index < 0) {
      dec.hyperplanes.push_back({n, {}});
      index = static_cast<int>(dec.hyperplanes.size()) - 1;
    }
    dec.hyperplanes[index].functionals.push_back(i);
    dec.functional_hyperplane.push_back(index);
    dec.functional_orientation.push_back(orientation);
  }
  if (!any_nonzero) throw Error(ErrorKind::InvalidInput, "all Lyapunov functionals vanish");

  std::vector<Eigen::VectorXd> normals;
  for (const auto& h : dec.hyperplanes) normals.push_back(h.normal);
  for (const auto& point : region_points(normals, spectrum.rank)) {
    bool regular = false;
    std::vector<int> s = sign_vector(dec.hyperplanes, point, regular);
    if (!regular) continue;
    bool seen = false;
    for (const auto& c : dec.chambers) seen = seen || c.signs == s;
    if (!seen) dec.chambers.push_back({s, point, std::nullopt});
  }

  for (const auto& a : lattice_ball(spectrum.rank, search_bound)) {
    if (sup_norm(a) == 0) continue;
    bool regular = false;
    std::vector<int> s = sign_vector(dec.hyperplanes, a.cast<double>(), regular);
    if (!regular) continue;
    auto it = std::find_if(dec.chambers.begin(), dec.chambers.end(), [&](const Chamber& c) { return c.signs == s; });
    if (it == dec.chambers.end()) {
      dec.chambers.push_back({s, a.cast<double>(), a});
    } else if (!it->representative) {
      it->representative = a;
    }
  }
  std::sort(dec.chambers.begin(), dec.chambers.end(),
            [](const Chamber& x, const Chamber& y) { return x.signs > y.signs; });
  if (require_representatives)
    for (std::size_t c = 0; c < dec.chambers.size(); ++c)
      if (!dec.chambers[c].representative)
        throw Error(ErrorKind::RepresentativeNotFound,
                    "chamber " + std::to_string(c) + " has no lattice point with sup-norm <= " +
                        std::to_string(search_bound),
                    {static_cast<long long>(c), search_bound});
  dec.predicates = check_properties(spectrum, dec);
  return dec;
}

PredicateFlags check_properties(const LyapunovSpectrum& spectrum, const WeylChamberDecomposition& dec) {
  PredicateFlags f;
  const int k = spectrum.rank;
  const int n = spectrum.size();
  std::vector<CoarseClass> classes = coarse_classes(spectrum);
  const int h = static_cast<int>(dec.hyperplanes.size());

  f.cartan = std::all_of(classes.begin(), classes.end(), [](const CoarseClass& c) { return c.dimension == 1; });

  f.tns = true;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (negatively_proportional(spectrum.spaces[i].functional, spectrum.spaces[j].functional)) f.tns = false;

  f.resonance_free = true;
  for (int i = 0; i < n && f.resonance_free; ++i)
    for (int j = 0; j < n && f.resonance_free; ++j) {
      if (i == j) continue;
      const auto& xi = spectrum.spaces[i].functional;
      const auto& xj = spectrum.spaces[j].functional;
      if (positively_proportional(xi, xj)) continue;
      Eigen::VectorXd diff = xi - xj;
      for (int l = 0; l < n; ++l)
        if (proportional(diff, spectrum.spaces[l].functional)) {
          f.resonance_free = false;
          break;
        }
    }

  f.maximal = static_cast<int>(classes.size()) == k + 1 && h == k + 1;
  if (f.maximal && k >= 3) {
    for (int a = 0; a < h && f.maximal; ++a)
      for (int b = 0; b < h && f.maximal; ++b)
        for (int c = b + 1; c < h && f.maximal; ++c) {
          if (a == b || a == c) continue;
          Eigen::MatrixXd m(3, k);
          m.row(0) = dec.hyperplanes[a].normal.transpose();
          m.row(1) = dec.hyperplanes[b].normal.transpose();
          m.row(2) = dec.hyperplanes[c].normal.transpose();
          if (rank_of(m) < 3) f.maximal = false;
        }
  }

  f.full = h >= 2;
  for (const auto& cls : classes) {
    if (!f.full) break;
    bool found = false;
    for (const auto& chamber : dec.chambers) {
      if (!chamber.representative) continue;
      std::vector<int> s = dec.functional_signs(chamber);
      bool ok = true;
      for (int i = 0; i < n && ok; ++i) {
        bool member = std::find(cls.members.begin(), cls.members.end(), i) != cls.members.end();
        ok = member ? s[i] > 0 : s[i] < 0;
      }
      if (ok) {
        found = true;
        break;
      }
    }
    f.full = found;
  }
  return f;
}

LatticePoint regular_representative(const WeylChamberDecomposition& dec, int chamber, int bound) {
  if (chamber < 0 || chamber >= static_cast<int>(dec.chambers.size()))
    throw Error(ErrorKind::InvalidInput, "chamber index out of range");
  const auto& target = dec.chambers[chamber].signs;
  for (const auto& a : lattice_ball(dec.rank, bound)) {
    if (sup_norm(a) == 0) continue;
    bool regular = false;
    std::vector<int> s = sign_vector(dec.hyperplanes, a.cast<double>(), regular);
    if (regular && s == target) return a;
  }
  throw Error(ErrorKind::RepresentativeNotFound,
              "no lattice point with sup-norm <= " + std::to_string(bound) + " in chamber " + std::to_string(chamber),
              {chamber, bound});
}

ImplicationReport implication_suite(const std::vector<CorpusEntry>& corpus, int search_bound) {
  if (corpus.empty()) throw Error(ErrorKind::InvalidInput, "empty corpus");
  ImplicationReport report;
  for (const auto& entry : corpus) {
    WeylChamberDecomposition dec = chambers(entry.spectrum, search_bound, false);
    ImplicationMember m;
    m.name = entry.name;
    m.flags = dec.predicates;
    m.chamber_count = static_cast<long long>(dec.chambers.size());
    bool bad = (m.flags.maximal && !m.flags.full) || (m.flags.full && !(m.flags.tns && m.flags.resonance_free));
    if (m.flags.maximal && m.chamber_count != (1LL << (entry.spectrum.rank + 1)) - 2) bad = true;
    m.violated = bad;
    if (bad) report.violations.push_back(entry.name);
    report.members.push_back(m);
  }
  return report;
}

std::string chamber_svg(const WeylChamberDecomposition& dec) {
  if (dec.rank != 2) throw Error(ErrorKind::InvalidInput, "chamber diagrams are drawn for rank 2 only");
  const double size = 400.0, c = size / 2.0, radius = 150.0;
  std::ostringstream svg;
  svg.setf(std::ios::fixed);
  svg.precision(2);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
  svg << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "  <circle cx=\"" << c << "\" cy=\"" << c << "\" r=\"" << radius
      << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  for (std::size_t h = 0; h < dec.hyperplanes.size(); ++h) {
    const auto& n = dec.hyperplanes[h].normal;
    double dx = -n(1), dy = n(0);
    svg << "  <line x1=\"" << c - radius * dx << "\" y1=\"" << c + radius * dy << "\" x2=\"" << c + radius * dx
        << "\" y2=\"" << c - radius * dy << "\" stroke=\"#1f4e9c\" stroke-width=\"1.5\"/>\n";
    svg << "  <text x=\"" << c + (radius + 12) * dx << "\" y=\"" << c - (radius + 12) * dy
        << "\" font-size=\"11\" fill=\"#1f4e9c\" text-anchor=\"middle\">H" << h << "</text>\n";
  }
  for (const auto& ch : dec.chambers) {
    Eigen::VectorXd w = ch.witness.normalized();
    std::string signs;
    for (int s : ch.signs) signs += s > 0 ? '+' : '-';
    std::string rep = "none";
    if (ch.representative) rep = "(" + std::to_string((*ch.representative)(0)) + "," +
                                  std::to_string((*ch.representative)(1)) + ")";
    double x = c + 0.65 * radius * w(0), y = c - 0.65 * radius * w(1);
    svg << "  <text x=\"" << x << "\" y=\"" << y << "\" font-size=\"12\" text-anchor=\"middle\">" << signs
        << "</text>\n";
    svg << "  <text x=\"" << x << "\" y=\"" << y + 14 << "\" font-size=\"10\" fill=\"#555\" text-anchor=\"middle\">"
        << rep << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace toralrig
