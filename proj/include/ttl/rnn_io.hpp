#pragma once

#include <map>
#include <sstream>
#include <string>

#include "ttl/csv.hpp"
#include "ttl/rnn.hpp"

namespace ttl {

// Weight snapshot layout:
//
//   layer,row,col,value
//   #n=8;k=1;readout_index=0;channel=u;input_center=...;input_scale=...;output_scale=...;trained_eps=0
//   C,0,0,1            (diagonal only)
//   Wx,i,j,...         (row-major)
//   Wp,i,j,...         (row-major)
//
// Numbers use the shortest round-trip form, so write/read is exact.

inline std::string weights_to_csv(const RnnNetwork& net) {
  net.validate();
  std::ostringstream out;
  out << "layer,row,col,value\n";
  out << "#n=" << net.size() << ";k=" << net.inputs() << ";readout_index=" << net.readout
      << ";channel=" << to_string(net.channel)
      << ";input_center=" << csv::shortest(net.scaling.input_center)
      << ";input_scale=" << csv::shortest(net.scaling.input_scale)
      << ";output_scale=" << csv::shortest(net.scaling.output_scale)
      << ";trained_eps=" << csv::shortest(net.trained_eps) << "\n";
  for (Eigen::Index i = 0; i < net.size(); ++i)
    out << "C," << i << ',' << i << ',' << csv::shortest(net.leak(i)) << '\n';
  for (Eigen::Index i = 0; i < net.w_rec.rows(); ++i)
    for (Eigen::Index j = 0; j < net.w_rec.cols(); ++j)
      out << "Wx," << i << ',' << j << ',' << csv::shortest(net.w_rec(i, j)) << '\n';
  for (Eigen::Index i = 0; i < net.w_in.rows(); ++i)
    for (Eigen::Index j = 0; j < net.w_in.cols(); ++j)
      out << "Wp," << i << ',' << j << ',' << csv::shortest(net.w_in(i, j)) << '\n';
  return out.str();
}

inline RnnNetwork weights_from_csv(const std::string& text) {
  const auto rows = csv::lines(text);
  if (rows.size() < 2 || rows[0] != "layer,row,col,value")
    throw ConfigError("weights: missing header 'layer,row,col,value'");
  if (rows[1].empty() || rows[1][0] != '#') throw ConfigError("weights: missing metadata line");

  std::map<std::string, std::string> meta;
  for (const auto& kv : csv::split(rows[1].substr(1), ';')) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("weights: bad metadata entry '" + kv + "'");
    meta[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  auto need = [&](const std::string& key) -> const std::string& {
    auto it = meta.find(key);
    if (it == meta.end()) throw ConfigError("weights: metadata lacks '" + key + "'");
    return it->second;
  };
  const auto n = static_cast<Eigen::Index>(csv::parse_double(need("n")));
  const auto k = static_cast<Eigen::Index>(csv::parse_double(need("k")));
  if (n <= 0 || k <= 0) throw ConfigError("weights: bad dimensions");

  RnnNetwork net;
  net.state = Eigen::VectorXd::Zero(n);
  net.leak = Eigen::VectorXd::Constant(n, std::nan(""));
  net.w_rec = Eigen::MatrixXd::Constant(n, n, std::nan(""));
  net.w_in = Eigen::MatrixXd::Constant(n, k, std::nan(""));
  net.readout = static_cast<Eigen::Index>(csv::parse_double(need("readout_index")));
  net.channel = channel_from_string(need("channel"));
  net.scaling.input_center = csv::parse_double(need("input_center"));
  net.scaling.input_scale = csv::parse_double(need("input_scale"));
  net.scaling.output_scale = csv::parse_double(need("output_scale"));
  net.trained_eps = csv::parse_double(need("trained_eps"));

  for (std::size_t r = 2; r < rows.size(); ++r) {
    const auto f = csv::split(rows[r]);
    if (f.size() != 4) throw ConfigError("weights: expected 4 fields in '" + rows[r] + "'");
    const auto i = static_cast<Eigen::Index>(csv::parse_double(f[1]));
    const auto j = static_cast<Eigen::Index>(csv::parse_double(f[2]));
    const double v = csv::parse_double(f[3]);
    if (f[0] == "C") {
      if (i != j || i < 0 || i >= n) throw ConfigError("weights: bad C index");
      net.leak(i) = v;
    } else if (f[0] == "Wx") {
      if (i < 0 || i >= n || j < 0 || j >= n) throw ConfigError("weights: bad Wx index");
      net.w_rec(i, j) = v;
    } else if (f[0] == "Wp") {
      if (i < 0 || i >= n || j < 0 || j >= k) throw ConfigError("weights: bad Wp index");
      net.w_in(i, j) = v;
    } else {
      throw ConfigError("weights: unknown layer '" + f[0] + "'");
    }
  }
  net.validate();  // rejects entries that were never written (still NaN)
  return net;
}

inline void save_weights(const std::string& path, const RnnNetwork& net) {
  csv::write_file(path, weights_to_csv(net));
}

inline RnnNetwork load_weights(const std::string& path) {
  return weights_from_csv(csv::read_file(path));
}

}  // namespace ttl
