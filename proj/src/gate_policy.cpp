#include "arbsim/gate_policy.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "arbsim/errors.hpp"

namespace arbsim {

// --- RunningNormalizer ---

RunningNormalizer::RunningNormalizer(int dim)
    : mean_(Eigen::VectorXd::Zero(dim)),
      var_(Eigen::VectorXd::Ones(dim)),
      m2_(Eigen::VectorXd::Zero(dim)) {}

void RunningNormalizer::update(const Eigen::VectorXd& x) {
  // Welford, one sample at a time
  count_ += 1.0;
  const Eigen::VectorXd delta = x - mean_;
  mean_ += delta / count_;
  const Eigen::VectorXd delta2 = x - mean_;
  if (count_ == 1.0) {
    m2_ = delta.cwiseProduct(delta2);
    var_ = Eigen::VectorXd::Ones(mean_.size());
  } else {
    m2_ += delta.cwiseProduct(delta2);
    var_ = (m2_ / count_).cwiseMax(kVarFloor);
  }
}

Eigen::VectorXd RunningNormalizer::normalize(const Eigen::VectorXd& x, bool clip) const {
  Eigen::VectorXd z = (x - mean_).cwiseQuotient(var_.cwiseMax(kVarFloor).cwiseSqrt());
  if (clip) z = z.cwiseMax(-clip_).cwiseMin(clip_);
  return z;
}

Eigen::VectorXd RunningNormalizer::denormalize(const Eigen::VectorXd& z) const {
  return z.cwiseProduct(var_.cwiseMax(kVarFloor).cwiseSqrt()) + mean_;
}

void RunningNormalizer::set_state(const Eigen::VectorXd& mean, const Eigen::VectorXd& var,
                                  double count, double clip) {
  mean_ = mean;
  var_ = var.cwiseMax(kVarFloor);
  m2_ = var_ * (count > 0 ? count : 1.0);
  count_ = count;
  clip_ = clip;
}

// --- Mlp ---

void Mlp::Grads::setZero() {
  for (auto& l : g) {
    l.W.setZero();
    l.b.setZero();
  }
}

Mlp::Mlp(int in_dim, const std::vector<int>& hidden, Rng& rng, double out_scale) {
  std::vector<int> dims;
  dims.push_back(in_dim);
  for (int h : hidden) dims.push_back(h);
  dims.push_back(1);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Layer layer;
    const int fan_in = dims[l], fan_out = dims[l + 1];
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    layer.W.resize(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) layer.W(r, c) = rng.uniform(-a, a);
    layer.b = Eigen::VectorXd::Zero(fan_out);
    layers_.push_back(std::move(layer));
  }
  layers_.back().W *= out_scale;
}

double Mlp::forward(const Eigen::VectorXd& x, Cache* cache) const {
  Eigen::VectorXd h = x;
  if (cache) {
    cache->x = x;
    cache->act.clear();
  }
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    h = (layers_[l].W * h + layers_[l].b).array().tanh().matrix();
    if (cache) cache->act.push_back(h);
  }
  const double out = (layers_.back().W * h + layers_.back().b)(0);
  if (cache) cache->out = out;
  return out;
}

void Mlp::backward(const Cache& cache, double dout, Grads& grads) const {
  const std::size_t last = layers_.size() - 1;
  const Eigen::VectorXd& h_last = cache.act.empty() ? cache.x : cache.act.back();
  grads.g[last].W.row(0) += dout * h_last.transpose();
  grads.g[last].b(0) += dout;
  Eigen::VectorXd dh = layers_[last].W.transpose() * dout;
  for (std::size_t l = last; l-- > 0;) {
    const Eigen::VectorXd& h = cache.act[l];
    const Eigen::VectorXd dpre =
        dh.cwiseProduct((1.0 - h.array().square()).matrix());
    const Eigen::VectorXd& prev = l == 0 ? cache.x : cache.act[l - 1];
    grads.g[l].W += dpre * prev.transpose();
    grads.g[l].b += dpre;
    if (l > 0) dh = layers_[l].W.transpose() * dpre;
  }
}

Mlp::Grads Mlp::zero_grads() const {
  Grads g;
  for (const auto& l : layers_) {
    Layer z;
    z.W = Eigen::MatrixXd::Zero(l.W.rows(), l.W.cols());
    z.b = Eigen::VectorXd::Zero(l.b.size());
    g.g.push_back(std::move(z));
  }
  return g;
}

int Mlp::param_count() const {
  int n = 0;
  for (const auto& l : layers_) n += static_cast<int>(l.W.size() + l.b.size());
  return n;
}

// --- GatePolicy ---

GatePolicy::GatePolicy(int obs_dim, const std::vector<int>& hidden, uint64_t seed)
    : obs_dim_(obs_dim), hidden_(hidden), norm_(obs_dim) {
  Rng rng(seed);
  pi_ = Mlp(obs_dim, hidden, rng, 0.01);  // small initial gate mean
  vf_ = Mlp(obs_dim, hidden, rng, 1.0);
  log_std_ = 0.0;
}

GateOutput GatePolicy::forward_normalized(const Eigen::VectorXd& obs_norm) const {
  GateOutput out;
  out.z = pi_.forward(obs_norm);
  out.value = vf_.forward(obs_norm);
  out.alpha = sigmoid(out.z);
  if (!std::isfinite(out.z) || !std::isfinite(out.value) || !std::isfinite(out.alpha))
    throw NonFiniteActivation("non-finite policy activation");
  return out;
}

GateOutput GatePolicy::forward(const Observation& obs) const {
  const auto arr = obs.to_array();
  const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(arr.data(), arr.size());
  return forward_normalized(norm_.normalize(x));
}

double GatePolicy::sample_z(const Eigen::VectorXd& obs_norm, Rng& rng) const {
  const double mu = pi_.forward(obs_norm);
  if (!std::isfinite(mu)) throw NonFiniteActivation("non-finite policy mean");
  return mu + std::exp(log_std_) * rng.normal();
}

double GatePolicy::log_prob(const Eigen::VectorXd& obs_norm, double z) const {
  const double mu = pi_.forward(obs_norm);
  const double std = std::exp(log_std_);
  const double d = (z - mu) / std;
  return -0.5 * d * d - log_std_ - 0.5 * std::log(2.0 * kPi);
}

double GatePolicy::entropy() const {
  return 0.5 * (1.0 + std::log(2.0 * kPi)) + log_std_;
}

double GatePolicy::value(const Eigen::VectorXd& obs_norm) const {
  return vf_.forward(obs_norm);
}

namespace {
void flatten_mlp(const Mlp& m, Eigen::VectorXd& theta, int& k) {
  for (const auto& l : m.layers()) {
    for (int r = 0; r < l.W.rows(); ++r)
      for (int c = 0; c < l.W.cols(); ++c) theta(k++) = l.W(r, c);
    for (int i = 0; i < l.b.size(); ++i) theta(k++) = l.b(i);
  }
}
void unflatten_mlp(Mlp& m, const Eigen::VectorXd& theta, int& k) {
  for (auto& l : m.layers()) {
    for (int r = 0; r < l.W.rows(); ++r)
      for (int c = 0; c < l.W.cols(); ++c) l.W(r, c) = theta(k++);
    for (int i = 0; i < l.b.size(); ++i) l.b(i) = theta(k++);
  }
}
}  // namespace

Eigen::VectorXd GatePolicy::flatten_params() const {
  Eigen::VectorXd theta(param_count());
  int k = 0;
  flatten_mlp(pi_, theta, k);
  theta(k++) = log_std_;
  flatten_mlp(vf_, theta, k);
  return theta;
}

void GatePolicy::set_params(const Eigen::VectorXd& theta) {
  int k = 0;
  unflatten_mlp(pi_, theta, k);
  log_std_ = theta(k++);
  unflatten_mlp(vf_, theta, k);
}

int GatePolicy::param_count() const {
  return pi_.param_count() + 1 + vf_.param_count();
}

// --- checkpoint io: versioned text container with hexfloat payload ---

namespace {

void write_scalar(std::ostream& os, double v) {
  std::ostringstream ss;
  ss << std::hexfloat << v;
  os << ss.str();
}

double read_scalar(std::istream& is) {
  std::string tok;
  if (!(is >> tok)) throw ConfigError("truncated policy checkpoint");
  return std::stod(tok);
}

void write_mlp(std::ostream& os, const std::string& name, const Mlp& m) {
  int idx = 0;
  for (const auto& l : m.layers()) {
    os << "tensor " << name << ".W" << idx << " " << l.W.rows() << " " << l.W.cols() << "\n";
    for (int r = 0; r < l.W.rows(); ++r) {
      for (int c = 0; c < l.W.cols(); ++c) {
        write_scalar(os, l.W(r, c));
        os << (c + 1 == l.W.cols() ? "" : " ");
      }
      os << "\n";
    }
    os << "tensor " << name << ".b" << idx << " " << l.b.size() << " 1\n";
    for (int i = 0; i < l.b.size(); ++i) {
      write_scalar(os, l.b(i));
      os << (i + 1 == l.b.size() ? "" : " ");
    }
    os << "\n";
    ++idx;
  }
}

void read_mlp(std::istream& is, const std::string& name, Mlp& m) {
  int idx = 0;
  for (auto& l : m.layers()) {
    std::string kw, tname;
    long rows, cols;
    is >> kw >> tname >> rows >> cols;
    if (kw != "tensor" || tname != name + ".W" + std::to_string(idx) ||
        rows != l.W.rows() || cols != l.W.cols())
      throw ConfigError("policy checkpoint layout mismatch at " + tname);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) l.W(r, c) = read_scalar(is);
    is >> kw >> tname >> rows >> cols;
    if (kw != "tensor" || rows != l.b.size())
      throw ConfigError("policy checkpoint layout mismatch at " + tname);
    for (int i = 0; i < rows; ++i) l.b(i) = read_scalar(is);
    ++idx;
  }
}

}  // namespace

void GatePolicy::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write policy checkpoint: " + path);
  f << "arbsim-policy v1\n";
  f << "obs_dim " << obs_dim_ << "\n";
  f << "hidden";
  for (int h : hidden_) f << " " << h;
  f << "\n";
  f << "log_std ";
  write_scalar(f, log_std_);
  f << "\n";
  write_mlp(f, "pi", pi_);
  write_mlp(f, "vf", vf_);
  f << "normalizer count ";
  write_scalar(f, norm_.count());
  f << " clip ";
  write_scalar(f, norm_.clip_bound());
  f << "\nmean\n";
  for (int i = 0; i < norm_.dim(); ++i) {
    write_scalar(f, norm_.mean()(i));
    f << (i + 1 == norm_.dim() ? "" : " ");
  }
  f << "\nvar\n";
  for (int i = 0; i < norm_.dim(); ++i) {
    write_scalar(f, norm_.variance()(i));
    f << (i + 1 == norm_.dim() ? "" : " ");
  }
  f << "\n";
}

GatePolicy GatePolicy::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open policy checkpoint: " + path);
  std::string magic, version;
  f >> magic >> version;
  if (magic != "arbsim-policy" || version != "v1")
    throw ConfigError("unrecognized policy checkpoint header in " + path);
  std::string key;
  int obs_dim = 0;
  f >> key >> obs_dim;
  if (key != "obs_dim" || obs_dim <= 0) throw ConfigError("bad obs_dim in " + path);
  f >> key;
  if (key != "hidden") throw ConfigError("bad hidden spec in " + path);
  std::vector<int> hidden;
  std::string line;
  std::getline(f, line);
  {
    std::istringstream ss(line);
    int h;
    while (ss >> h) hidden.push_back(h);
  }
  GatePolicy p(obs_dim, hidden, 0);
  f >> key;
  if (key != "log_std") throw ConfigError("bad log_std in " + path);
  p.log_std_ = read_scalar(f);
  read_mlp(f, "pi", p.pi_);
  read_mlp(f, "vf", p.vf_);
  std::string kw1, kw2;
  f >> kw1 >> kw2;
  if (kw1 != "normalizer" || kw2 != "count") throw ConfigError("bad normalizer in " + path);
  const double count = read_scalar(f);
  f >> kw1;
  const double clip = read_scalar(f);
  f >> kw1;
  Eigen::VectorXd mean(obs_dim), var(obs_dim);
  for (int i = 0; i < obs_dim; ++i) mean(i) = read_scalar(f);
  f >> kw1;
  for (int i = 0; i < obs_dim; ++i) var(i) = read_scalar(f);
  p.norm_.set_state(mean, var, count, clip);
  return p;
}

}  // namespace arbsim
