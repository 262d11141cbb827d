#include "model_io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"

namespace evcop {

using nlohmann::json;

StoredModel StoredModel::from_fit(const FittedModel& m, bool normalize_w) {
  StoredModel s;
  s.degree = m.basis.degree();
  s.knots = m.basis.config().interior;
  s.theta = m.theta;
  s.center_applied = m.center_applied;
  s.flipped = m.flipped;
  s.normalize_w = normalize_w;
  s.lambda = m.lambda;
  s.loglik = m.loglik;
  s.penalty = m.penalty;
  s.iterations = m.iterations;
  s.converged = m.converged;
  return s;
}

ZBasis StoredModel::basis() const { return ZBasis(KnotConfig{knots, degree}); }

PickandsModel StoredModel::pickands() const {
  return pickands_from_theta(basis(), theta, center_applied, normalize_w, flipped);
}

Curve StoredModel::curve() const {
  const Curve a = pickands().as_curve();
  return symmetrize ? evcop::symmetrize(a) : a;
}

EvCopula StoredModel::copula() const { return EvCopula(curve(), survival); }

std::string model_to_json(const StoredModel& m) {
  json j;
  j["version"] = m.version;
  j["degree"] = m.degree;
  j["knots"] = m.knots;
  j["theta"] = std::vector<double>(m.theta.data(), m.theta.data() + m.theta.size());
  j["center_applied"] = m.center_applied;
  j["flipped"] = m.flipped;
  j["normalize_w"] = m.normalize_w;
  j["lambda"] = m.lambda;
  j["survival"] = m.survival;
  j["symmetrize"] = m.symmetrize;
  j["diagnostics"] = {{"loglik", m.loglik},
                      {"penalty", m.penalty},
                      {"iterations", m.iterations},
                      {"converged", m.converged}};
  return j.dump(2);
}

StoredModel model_from_json(const std::string& text) {
  StoredModel m;
  try {
    const json j = json::parse(text);
    m.version = j.at("version").get<int>();
    if (m.version != 1) throw InputError("model: unsupported version " + std::to_string(m.version));
    m.degree = j.at("degree").get<int>();
    m.knots = j.at("knots").get<std::vector<double>>();
    const auto th = j.at("theta").get<std::vector<double>>();
    m.theta = Eigen::Map<const Eigen::VectorXd>(th.data(), Eigen::Index(th.size()));
    m.center_applied = j.at("center_applied").get<bool>();
    m.flipped = j.at("flipped").get<bool>();
    m.lambda = j.at("lambda").get<double>();
    m.normalize_w = j.value("normalize_w", true);
    m.survival = j.value("survival", false);
    m.symmetrize = j.value("symmetrize", false);
    const auto& d = j.at("diagnostics");
    m.loglik = d.at("loglik").get<double>();
    m.penalty = d.at("penalty").get<double>();
    m.iterations = d.at("iterations").get<int>();
    m.converged = d.at("converged").get<bool>();
  } catch (const json::exception& e) {
    throw InputError(std::string("model: ") + e.what());
  }
  KnotConfig{m.knots, m.degree}.validate();
  if (m.theta.size() != int(m.knots.size()) + m.degree)
    throw InputError("model: theta length does not match the knot configuration");
  if (!m.theta.allFinite()) throw InputError("model: non-finite coefficients");
  return m;
}

void save_model(const StoredModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << model_to_json(m) << '\n';
}

StoredModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

namespace {

bool parse_row(const std::string& line, std::array<double, 2>& row) {
  std::string s = line;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::replace(s.begin(), s.end(), ';', ' ');
  std::istringstream in(s);
  std::string a, b, extra;
  if (!(in >> a >> b) || (in >> extra)) return false;
  for (int k = 0; k < 2; ++k) {
    const std::string& tok = k == 0 ? a : b;
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || errno == ERANGE || !std::isfinite(v)) return false;
    row[k] = v;
  }
  return true;
}

}  // namespace

PairSample read_pairs(std::istream& in) {
  PairSample rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::array<double, 2> row{};
    if (parse_row(line, row)) {
      rows.push_back(row);
      continue;
    }
    if (rows.empty() && lineno == 1) continue;  // header
    throw InputError("malformed CSV at line " + std::to_string(lineno));
  }
  return rows;
}

PairSample read_pairs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  return read_pairs(in);
}

void write_pairs(std::ostream& out, const PairSample& rows, const std::string& header) {
  if (!header.empty()) out << header << '\n';
  out << std::setprecision(17);
  for (const auto& r : rows) out << r[0] << ',' << r[1] << '\n';
}

void write_pairs_file(const std::string& path, const PairSample& rows, const std::string& header) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  write_pairs(out, rows, header);
}

PairSample pseudo_observations(const PairSample& rows) {
  const std::size_t n = rows.size();
  PairSample out(n);
  std::vector<std::size_t> idx(n);
  for (int c = 0; c < 2; ++c) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return rows[a][c] < rows[b][c]; });
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j + 1 < n && rows[idx[j + 1]][c] == rows[idx[i]][c]) ++j;
      const double rank = 0.5 * double(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) out[idx[k]][c] = rank / double(n + 1);
      i = j + 1;
    }
  }
  return out;
}

PairSample survival_transform(const PairSample& rows) {
  PairSample out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = {1.0 - rows[i][0], 1.0 - rows[i][1]};
  return out;
}

}  // namespace evcop
