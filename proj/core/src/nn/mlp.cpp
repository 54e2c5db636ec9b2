#include "ppmarl/nn/mlp.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "ppmarl/rng.hpp"

namespace ppmarl {

namespace {

double apply_act(Activation a, double z) {
  switch (a) {
    case Activation::linear: return z;
    case Activation::relu: return z > 0.0 ? z : 0.0;
    case Activation::tanh: return std::tanh(z);
    case Activation::square: return z * z;
  }
  return z;
}

// Derivative as a function of the pre-activation (tanh recomputed from z).
double act_grad(Activation a, double z) {
  switch (a) {
    case Activation::linear: return 1.0;
    case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::square: return 2.0 * z;
  }
  return 1.0;
}

}  // namespace

const char* to_string(Activation a) {
  switch (a) {
    case Activation::linear: return "linear";
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::square: return "square";
  }
  return "linear";
}

Activation activation_from_string(const std::string& s) {
  if (s == "linear") return Activation::linear;
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  if (s == "square") return Activation::square;
  throw ConfigError("unknown activation: " + s);
}

std::size_t Mlp::param_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weights.size() + l.bias.size();
  return n;
}

Mlp make_mlp(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out,
             Activation hidden_act, Activation out_act, std::uint64_t seed) {
  if (in == 0 || out == 0) throw ConfigError("make_mlp: zero layer dimension");
  std::vector<std::size_t> dims;
  dims.push_back(in);
  for (std::size_t h : hidden) {
    if (h == 0) throw ConfigError("make_mlp: zero hidden dimension");
    dims.push_back(h);
  }
  dims.push_back(out);

  Rng rng(seed);
  Mlp net;
  net.layers.resize(dims.size() - 1);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    DenseLayer& layer = net.layers[l];
    layer.weights = Mat(dims[l + 1], dims[l]);
    layer.bias.assign(dims[l + 1], 0.0);
    layer.act = (l + 2 == dims.size()) ? out_act : hidden_act;
    const double bound = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
    for (double& w : layer.weights.data) w = rng.uniform(-bound, bound);
  }
  return net;
}

Vec forward(const Mlp& net, const Vec& input, ForwardTape* tape) {
  if (net.layers.empty()) throw ConfigError("forward: empty network");
  if (input.size() != net.in_dim()) throw ConfigError("forward: input dimension mismatch");

  if (tape) {
    tape->input = input;
    tape->pre.clear();
    tape->post.clear();
    tape->pre.reserve(net.layers.size());
    tape->post.reserve(net.layers.size());
  }

  Vec x = input;
  for (const auto& layer : net.layers) {
    Vec z = matvec(layer.weights, x);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += layer.bias[i];
    Vec a(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) a[i] = apply_act(layer.act, z[i]);
    if (tape) {
      tape->pre.push_back(z);
      tape->post.push_back(a);
    }
    x = std::move(a);
  }
  require_finite(x, "forward output");
  return x;
}

void GradBuffer::zero() {
  for (auto& m : dw) m.data.assign(m.data.size(), 0.0);
  for (auto& v : db) v.assign(v.size(), 0.0);
}

void GradBuffer::scale(double k) {
  for (auto& m : dw)
    for (double& x : m.data) x *= k;
  for (auto& v : db)
    for (double& x : v) x *= k;
}

void GradBuffer::axpy(double k, const GradBuffer& other) {
  if (dw.size() != other.dw.size()) throw UsageError("GradBuffer::axpy: shape mismatch");
  for (std::size_t l = 0; l < dw.size(); ++l) {
    for (std::size_t i = 0; i < dw[l].data.size(); ++i) dw[l].data[i] += k * other.dw[l].data[i];
    for (std::size_t i = 0; i < db[l].size(); ++i) db[l][i] += k * other.db[l][i];
  }
}

bool GradBuffer::finite() const {
  for (const auto& m : dw)
    if (!all_finite(m.data)) return false;
  for (const auto& v : db)
    if (!all_finite(v)) return false;
  return true;
}

GradBuffer make_grad_buffer(const Mlp& net) {
  GradBuffer g;
  g.dw.reserve(net.layers.size());
  g.db.reserve(net.layers.size());
  for (const auto& l : net.layers) {
    g.dw.emplace_back(l.weights.rows, l.weights.cols);
    g.db.emplace_back(l.bias.size(), 0.0);
  }
  return g;
}

Vec backward(const Mlp& net, const ForwardTape& tape, const Vec& out_grad, GradBuffer& grads) {
  const std::size_t n_layers = net.layers.size();
  if (tape.pre.size() != n_layers || tape.post.size() != n_layers) {
    throw UsageError("backward: tape does not match network depth");
  }
  if (tape.input.size() != net.in_dim() || out_grad.size() != net.out_dim()) {
    throw UsageError("backward: tape/gradient dimension mismatch");
  }
  if (grads.dw.size() != n_layers) throw UsageError("backward: grad buffer mismatch");

  Vec da = out_grad;
  for (std::size_t li = n_layers; li-- > 0;) {
    const DenseLayer& layer = net.layers[li];
    const Vec& z = tape.pre[li];
    if (z.size() != layer.weights.rows) throw UsageError("backward: stale tape");
    const Vec& x = (li == 0) ? tape.input : tape.post[li - 1];

    Vec dz(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) dz[i] = da[i] * act_grad(layer.act, z[i]);

    Mat& dw = grads.dw[li];
    for (std::size_t r = 0; r < dw.rows; ++r) {
      const double g = dz[r];
      double* row = &dw.data[r * dw.cols];
      for (std::size_t c = 0; c < dw.cols; ++c) row[c] += g * x[c];
      grads.db[li][r] += g;
    }
    da = matvec_transpose(layer.weights, dz);
  }
  return da;
}

void soft_update(Mlp& target, const Mlp& source, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("soft_update: tau must be in (0, 1]");
  if (target.layers.size() != source.layers.size()) throw ConfigError("soft_update: layer mismatch");
  for (std::size_t l = 0; l < target.layers.size(); ++l) {
    auto& t = target.layers[l];
    const auto& s = source.layers[l];
    if (t.weights.size() != s.weights.size() || t.bias.size() != s.bias.size()) {
      throw ConfigError("soft_update: shape mismatch");
    }
    for (std::size_t i = 0; i < t.weights.data.size(); ++i) {
      t.weights.data[i] = (1.0 - tau) * t.weights.data[i] + tau * s.weights.data[i];
    }
    for (std::size_t i = 0; i < t.bias.size(); ++i) {
      t.bias[i] = (1.0 - tau) * t.bias[i] + tau * s.bias[i];
    }
  }
}

std::uint64_t forward_mult_count(const Mlp& net) {
  std::uint64_t n = 0;
  for (const auto& l : net.layers) n += l.weights.rows * l.weights.cols;
  return n;
}

namespace {

nlohmann::json mlp_to_json(const Mlp& net) {
  nlohmann::json j;
  j["format"] = "ppmarl-mlp";
  j["version"] = 1;
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : net.layers) {
    nlohmann::json lj;
    lj["rows"] = l.weights.rows;
    lj["cols"] = l.weights.cols;
    lj["activation"] = to_string(l.act);
    lj["weights"] = l.weights.data;  // row-major
    lj["bias"] = l.bias;
    layers.push_back(std::move(lj));
  }
  j["layers"] = std::move(layers);
  return j;
}

Mlp mlp_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "ppmarl-mlp") throw DataError("checkpoint: bad format tag");
  if (j.value("version", 0) != 1) throw DataError("checkpoint: unsupported version");
  Mlp net;
  for (const auto& lj : j.at("layers")) {
    DenseLayer l;
    l.weights = Mat(lj.at("rows").get<std::size_t>(), lj.at("cols").get<std::size_t>());
    l.weights.data = lj.at("weights").get<std::vector<double>>();
    l.bias = lj.at("bias").get<Vec>();
    l.act = activation_from_string(lj.at("activation").get<std::string>());
    if (l.weights.data.size() != l.weights.rows * l.weights.cols ||
        l.bias.size() != l.weights.rows) {
      throw DataError("checkpoint: inconsistent layer shapes");
    }
    net.layers.push_back(std::move(l));
  }
  for (std::size_t l = 0; l + 1 < net.layers.size(); ++l) {
    if (net.layers[l].weights.rows != net.layers[l + 1].weights.cols) {
      throw DataError("checkpoint: layer dimensions do not chain");
    }
  }
  return net;
}

}  // namespace

std::string checkpoint_to_string(const Mlp& net) { return mlp_to_json(net).dump(); }

Mlp checkpoint_from_string(const std::string& text) {
  return mlp_from_json(nlohmann::json::parse(text));
}

void save_checkpoint(const Mlp& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path.string());
  out << checkpoint_to_string(net) << '\n';
}

Mlp load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return checkpoint_from_string(text);
}

}  // namespace ppmarl
