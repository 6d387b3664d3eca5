#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "orbt/error.hpp"
#include "orbt/presentation.hpp"
#include "orbt/rep.hpp"
#include "orbt/spectrum.hpp"

namespace orbt {

using Json = nlohmann::ordered_json;

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

inline RatMat parse_rat_rows(const std::vector<std::string>& toks, std::size_t from, std::size_t to) {
  RatMat rows;
  RatVec cur;
  for (std::size_t i = from; i < to; ++i) {
    if (toks[i] == "|") {
      rows.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(parse_rat(toks[i]));
    }
  }
  if (!cur.empty()) rows.push_back(cur);
  return rows;
}

inline Cplx parse_cplx(const std::string& tok) {
  auto comma = tok.find(',');
  if (comma == std::string::npos) throw Error(Errc::BadInput, "complex entry needs re,im: " + tok);
  double re = std::stod(tok.substr(0, comma));
  double im = std::stod(tok.substr(comma + 1));
  return {re, im};
}

inline CMat parse_cplx_rows(const std::vector<std::string>& toks, std::size_t from, std::size_t to) {
  std::vector<std::vector<Cplx>> rows;
  std::vector<Cplx> cur;
  for (std::size_t i = from; i < to; ++i) {
    if (toks[i] == "|") {
      rows.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(parse_cplx(toks[i]));
    }
  }
  if (!cur.empty()) rows.push_back(cur);
  if (rows.empty()) throw Error(Errc::BadInput, "empty complex matrix");
  CMat m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw Error(Errc::BadInput, "ragged complex matrix");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

}  // namespace detail

/// Structured-text presentation: lines of `kind`, `dimension`, `lattice`,
/// `gram`, `element A-rows ; v`, and for circles `length`, `u0`, `h`.  Rows
/// separated by `|`, rationals as `p/q`, complex entries as `re,im`.
inline QuotientPresentation parse_presentation_text(const std::string& text) {
  QuotientPresentation p;
  bool saw_kind = false;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    auto toks = detail::split_ws(line);
    if (toks.empty()) continue;
    const std::string& key = toks[0];
    if (key == "kind") {
      if (toks.size() < 2) throw Error(Errc::BadInput, "kind needs a value");
      if (toks[1] == "flat")
        p.kind = PresentationKind::FlatCrystallographic;
      else if (toks[1] == "rank-one")
        p.kind = PresentationKind::RankOne;
      else
        throw Error(Errc::BadInput, "unknown kind: " + toks[1]);
      saw_kind = true;
    } else if (key == "dimension") {
      p.dimension = std::stoi(toks.at(1));
    } else if (key == "lattice") {
      p.lattice_basis = detail::parse_rat_rows(toks, 1, toks.size());
    } else if (key == "gram") {
      p.metric_gram = detail::parse_rat_rows(toks, 1, toks.size());
    } else if (key == "element") {
      auto semi = std::find(toks.begin(), toks.end(), ";");
      if (semi == toks.end()) throw Error(Errc::BadInput, "element needs `A-rows ; v`");
      std::size_t cut = static_cast<std::size_t>(semi - toks.begin());
      RatMat arows = detail::parse_rat_rows(toks, 1, cut);
      AffineElement g;
      g.A.assign(arows.size(), IntVec(arows.empty() ? 0 : arows[0].size(), 0));
      for (std::size_t i = 0; i < arows.size(); ++i)
        for (std::size_t j = 0; j < arows[i].size(); ++j) {
          if (denominator(arows[i][j]) != 1)
            throw Error(Errc::BadInput, "element linear part must be integral");
          g.A[i][j] = numerator(arows[i][j]);
        }
      for (std::size_t i = cut + 1; i < toks.size(); ++i) g.v.push_back(parse_rat(toks[i]));
      p.elements.push_back(g);
    } else if (key == "length") {
      p.rank_one.ell = parse_rat(toks.at(1));
    } else if (key == "u0") {
      p.rank_one.u0 = detail::parse_cplx_rows(toks, 1, toks.size());
    } else if (key == "h") {
      p.rank_one.h.push_back(detail::parse_cplx_rows(toks, 1, toks.size()));
    } else {
      throw Error(Errc::BadInput, "unknown presentation key: " + key);
    }
  }
  if (!saw_kind) throw Error(Errc::BadInput, "presentation needs a kind line");
  if (p.kind == PresentationKind::RankOne) p.dimension = 1;
  return p;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::BadInput, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline QuotientPresentation load_presentation(const std::string& path) {
  return parse_presentation_text(read_file(path));
}

namespace detail {

inline CMat json_matrix(const Json& rows) {
  if (!rows.is_array() || rows.empty()) throw Error(Errc::BadInput, "matrix must be a row array");
  std::size_t nr = rows.size(), ncol = rows[0].size();
  CMat m(static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(ncol));
  for (std::size_t i = 0; i < nr; ++i) {
    if (rows[i].size() != ncol) throw Error(Errc::BadInput, "ragged matrix");
    for (std::size_t j = 0; j < ncol; ++j) {
      const auto& e = rows[i][j];
      if (!e.is_array() || e.size() != 2) throw Error(Errc::BadInput, "entry must be [re, im]");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          Cplx(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

inline Json matrix_json(const CMat& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace detail

/// Representation JSON: named generator matrices, row-major, complex entries
/// as [re, im] pairs.  Lattice generators are t1..tn, coset elements c1..cm in
/// presentation order (identity omitted), the circle generator is `gamma`, and
/// isotropy elements are h1..hm.
inline HolonomyRep load_rep_json(const std::string& path, const QuotientPresentation& p) {
  Json j = Json::parse(read_file(path));
  HolonomyRep r;
  r.name = j.value("name", std::string("rep"));
  r.rank = j.at("rank").get<int>();
  const Json& g = j.at("generators");
  if (p.kind == PresentationKind::RankOne) {
    r.g1 = detail::json_matrix(g.at("gamma"));
    r.h.clear();
    r.h.push_back(CMat::Identity(r.rank, r.rank));
    for (std::size_t i = 1; i < p.rank_one.h.size(); ++i) {
      char key[16];
      std::snprintf(key, sizeof(key), "h%zu", i);
      r.h.push_back(detail::json_matrix(g.at(key)));
    }
    return r;
  }
  for (int i = 1; i <= p.dimension; ++i) {
    char key[16];
    std::snprintf(key, sizeof(key), "t%d", i);
    r.lattice.push_back(detail::json_matrix(g.at(key)));
  }
  std::size_t ci = 0;
  for (const auto& el : p.elements) {
    if (el.is_identity()) {
      r.coset.push_back(CMat::Identity(r.rank, r.rank));
      continue;
    }
    char key[16];
    std::snprintf(key, sizeof(key), "c%zu", ++ci);
    r.coset.push_back(detail::json_matrix(g.at(key)));
  }
  return r;
}

inline Json rep_json(const QuotientPresentation& p, const HolonomyRep& r) {
  Json j;
  j["name"] = r.name;
  j["rank"] = r.rank;
  Json g;
  if (p.kind == PresentationKind::RankOne) {
    g["gamma"] = detail::matrix_json(r.g1);
    for (std::size_t i = 1; i < r.h.size(); ++i) {
      char key[16];
      std::snprintf(key, sizeof(key), "h%zu", i);
      g[key] = detail::matrix_json(r.h[i]);
    }
  } else {
    for (std::size_t i = 0; i < r.lattice.size(); ++i) {
      char key[16];
      std::snprintf(key, sizeof(key), "t%zu", i + 1);
      g[key] = detail::matrix_json(r.lattice[i]);
    }
    std::size_t ci = 0;
    for (std::size_t i = 0; i < r.coset.size(); ++i) {
      if (p.elements[i].is_identity()) continue;
      char key[16];
      std::snprintf(key, sizeof(key), "c%zu", ++ci);
      g[key] = detail::matrix_json(r.coset[i]);
    }
  }
  j["generators"] = g;
  return j;
}

// ---- spectrum cache ----

inline std::string cache_key(const std::string& pres_hash, std::uint64_t rep_hash, double cutoff) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "spectrum-%s-%016llx-%.6f", pres_hash.c_str(),
                static_cast<unsigned long long>(rep_hash), cutoff);
  return buf;
}

inline void save_spectrum_csv(const SpectrumTable& st, const std::string& csv_path,
                              const std::string& sidecar_path, const std::string& pres_hash,
                              std::uint64_t rep_hash) {
  std::ofstream out(csv_path);
  if (!out) throw Error(Errc::BadInput, "cannot write " + csv_path);
  out << "degree,eigenvalue,multiplicity\n";
  char buf[64];
  for (int q = 0; q < st.degrees; ++q)
    for (const auto& sh : st.shells) {
      if (sh.mult[static_cast<std::size_t>(q)] == 0) continue;
      std::snprintf(buf, sizeof(buf), "%.17g", sh.lambda);
      out << q << "," << buf << "," << sh.mult[static_cast<std::size_t>(q)] << "\n";
    }
  Json meta;
  meta["presentation_hash"] = pres_hash;
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(rep_hash));
  meta["rep_hash"] = buf;
  meta["dimension"] = st.dimension;
  meta["degrees"] = st.degrees;
  meta["cutoff"] = st.cutoff;
  meta["betti"] = st.betti;
  meta["integrality_deviation"] = st.integrality_deviation;
  std::ofstream side(sidecar_path);
  side << meta.dump(2) << "\n";
}

inline bool load_spectrum_csv(SpectrumTable& st, const std::string& csv_path,
                              const std::string& sidecar_path, const std::string& pres_hash,
                              std::uint64_t rep_hash, double cutoff) {
  std::ifstream side(sidecar_path);
  if (!side) return false;
  Json meta;
  try {
    meta = Json::parse(side);
  } catch (...) {
    return false;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(rep_hash));
  if (meta.value("presentation_hash", std::string()) != pres_hash) return false;
  if (meta.value("rep_hash", std::string()) != std::string(buf)) return false;
  if (std::abs(meta.value("cutoff", -1.0) - cutoff) > 1e-9) return false;
  std::ifstream in(csv_path);
  if (!in) return false;
  st = SpectrumTable{};
  st.dimension = meta.at("dimension").get<int>();
  st.degrees = meta.at("degrees").get<int>();
  st.cutoff = meta.at("cutoff").get<double>();
  st.betti = meta.at("betti").get<std::vector<long>>();
  st.integrality_deviation = meta.value("integrality_deviation", 0.0);
  std::string line;
  std::getline(in, line);  // header
  std::map<double, std::vector<long>> shells;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    int q = 0;
    double lam = 0.0;
    long m = 0;
    if (std::sscanf(line.c_str(), "%d,%lg,%ld", &q, &lam, &m) != 3) return false;
    auto& row = shells[lam];
    if (row.empty()) row.assign(static_cast<std::size_t>(st.degrees), 0);
    row[static_cast<std::size_t>(q)] = m;
  }
  for (const auto& [lam, mult] : shells) {
    Shell sh;
    sh.lambda = lam;
    sh.mult = mult;
    sh.mult_raw.assign(mult.begin(), mult.end());
    st.shells.push_back(sh);
  }
  return true;
}

}  // namespace orbt
