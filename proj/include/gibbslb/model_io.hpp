#pragma once

#include "gibbslb/errors.hpp"
#include "gibbslb/linalg.hpp"
#include "gibbslb/spectral.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace gibbslb {

// Model file grammar (line based, '#' starts a comment):
//
//   qubits <n>
//   [hamiltonian]
//   <real coeff> <pauli word>
//   [jumps]
//   <label> <coeff> <pauli word>
//
// A jump coefficient is a real number or "(re,im)". Lines sharing a label
// are summed, so X - iY can be written as two lines.
struct Model {
  int qubits = 0;
  std::vector<PauliTerm> hamiltonian;
  std::vector<std::string> jump_labels;                       // first-seen order
  std::map<std::string, std::vector<std::pair<cplx, std::string>>> jump_terms;

  Mat H() const { return build_hamiltonian(hamiltonian, qubits); }
  std::vector<Jump> jumps() const;
};

inline cplx parse_coefficient(const std::string& tok, const std::string& where) {
  std::istringstream is(tok);
  cplx c;
  if (!tok.empty() && tok.front() == '(') {
    is >> c;
  } else {
    double re;
    is >> re;
    c = re;
  }
  std::string rest;
  if (is.fail() || is >> rest) throw InputError(where + ": bad coefficient '" + tok + "'");
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw InputError(where + ": non-finite coefficient");
  return c;
}

inline void check_word(const std::string& w, int n, const std::string& where) {
  if (static_cast<int>(w.size()) != n)
    throw InputError(where + ": Pauli word '" + w + "' has length " + std::to_string(w.size()) + ", expected " +
                     std::to_string(n));
  for (char c : w)
    if (std::string("IXYZ").find(c) == std::string::npos)
      throw InputError(where + ": invalid Pauli letter '" + std::string(1, c) + "'");
}

inline Model parse_model(std::istream& in, const std::string& name = "model") {
  Model m;
  enum class Section { None, Hamiltonian, Jumps } sec = Section::None;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = name + ":" + std::to_string(lineno);
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok[0] == "[hamiltonian]") {
      sec = Section::Hamiltonian;
    } else if (tok[0] == "[jumps]") {
      sec = Section::Jumps;
    } else if (tok[0] == "qubits") {
      if (tok.size() != 2) throw InputError(where + ": expected 'qubits <n>'");
      try {
        m.qubits = std::stoi(tok[1]);
      } catch (const std::exception&) {
        throw InputError(where + ": bad qubit count '" + tok[1] + "'");
      }
      if (m.qubits < 1 || m.qubits > kMaxQubits)
        throw InputError(where + ": qubit count must be in [1, " + std::to_string(kMaxQubits) + "]");
    } else if (sec == Section::Hamiltonian) {
      if (tok.size() != 2) throw InputError(where + ": expected '<coeff> <word>'");
      const cplx c = parse_coefficient(tok[0], where);
      if (c.imag() != 0.0) throw InputError(where + ": Hamiltonian coefficients must be real");
      if (m.qubits == 0) throw InputError(where + ": 'qubits' must precede the terms");
      check_word(tok[1], m.qubits, where);
      m.hamiltonian.push_back({c.real(), tok[1]});
    } else if (sec == Section::Jumps) {
      if (tok.size() != 3) throw InputError(where + ": expected '<label> <coeff> <word>'");
      if (m.qubits == 0) throw InputError(where + ": 'qubits' must precede the terms");
      check_word(tok[2], m.qubits, where);
      if (!m.jump_terms.count(tok[0])) m.jump_labels.push_back(tok[0]);
      m.jump_terms[tok[0]].push_back({parse_coefficient(tok[1], where), tok[2]});
    } else {
      throw InputError(where + ": unexpected line outside a section");
    }
  }
  if (m.qubits == 0) throw InputError(name + ": missing 'qubits'");
  if (m.hamiltonian.empty()) throw InputError(name + ": empty [hamiltonian] section");
  if (m.jump_labels.empty()) throw InputError(name + ": empty [jumps] section");
  return m;
}

inline Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  return parse_model(in, path);
}

inline std::vector<Jump> Model::jumps() const {
  std::vector<Jump> out;
  const Eigen::Index d = Eigen::Index(1) << qubits;
  for (const auto& label : jump_labels) {
    Mat A = Mat::Zero(d, d);
    for (const auto& [c, w] : jump_terms.at(label)) A += c * pauli_word(w);
    out.push_back({label, A});
  }
  return out;
}

}  // namespace gibbslb
