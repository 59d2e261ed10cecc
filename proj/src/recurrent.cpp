#include "rhpc/recurrent.hpp"

#include "rhpc/commnet.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>

namespace rhpc {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

constexpr char kMagic[8] = {'R', 'H', 'P', 'C', 'L', 'S', 'T', 'M'};
constexpr std::uint32_t kVersion = 1;

struct Views {
  ConstMap wx, wh, v;
};

Views views(const Eigen::VectorXd &p, int h) {
  const double *base = p.data();
  return {ConstMap(base, 4 * h, 2), ConstMap(base + 8 * h, 4 * h, h),
          ConstMap(base + 8 * h + 4 * h * h, 2, h)};
}

Eigen::VectorXd sigmoid(const Eigen::VectorXd &z) {
  return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

struct StepCache {
  Eigen::VectorXd i, f, o, g, c_prev, c, tc, h_prev;
};

} // namespace

RecurrentModel::RecurrentModel(int hidden, int history, double scale)
    : hidden_(hidden), history_(history), scale_(scale),
      params_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(param_count(hidden)))) {
  if (hidden < 1)
    throw std::invalid_argument("recurrent model needs hidden size >= 1");
  if (history < 2)
    throw std::invalid_argument("recurrent model needs a history of at least 2 samples");
  if (!(scale > 0.0))
    throw std::invalid_argument("recurrent model scale must be positive");
}

Eigen::Vector2d RecurrentModel::forward(std::span<const Eigen::Vector2d> inputs) const {
  const int h = hidden_;
  const Views w = views(params_, h);
  Eigen::VectorXd hs = Eigen::VectorXd::Zero(h), cs = Eigen::VectorXd::Zero(h);
  for (const Eigen::Vector2d &x : inputs) {
    const Eigen::VectorXd z = w.wx * x + w.wh * hs;
    const Eigen::VectorXd i = sigmoid(z.segment(0, h));
    const Eigen::VectorXd f = sigmoid(z.segment(h, h));
    const Eigen::VectorXd o = sigmoid(z.segment(2 * h, h));
    const Eigen::VectorXd g = z.segment(3 * h, h).array().tanh();
    cs = f.cwiseProduct(cs) + i.cwiseProduct(g);
    hs = o.cwiseProduct(cs.array().tanh().matrix());
  }
  return w.v * hs;
}

double RecurrentModel::loss_and_grad(std::span<const Eigen::Vector2d> inputs,
                                     const Eigen::Vector2d &target, Eigen::VectorXd &grad) const {
  const int h = hidden_;
  const Views w = views(params_, h);
  std::vector<StepCache> cache;
  cache.reserve(inputs.size());
  Eigen::VectorXd hs = Eigen::VectorXd::Zero(h), cs = Eigen::VectorXd::Zero(h);
  for (const Eigen::Vector2d &x : inputs) {
    StepCache sc;
    sc.h_prev = hs;
    sc.c_prev = cs;
    const Eigen::VectorXd z = w.wx * x + w.wh * hs;
    sc.i = sigmoid(z.segment(0, h));
    sc.f = sigmoid(z.segment(h, h));
    sc.o = sigmoid(z.segment(2 * h, h));
    sc.g = z.segment(3 * h, h).array().tanh();
    sc.c = sc.f.cwiseProduct(cs) + sc.i.cwiseProduct(sc.g);
    sc.tc = sc.c.array().tanh();
    hs = sc.o.cwiseProduct(sc.tc);
    cs = sc.c;
    cache.push_back(std::move(sc));
  }
  const Eigen::Vector2d y = w.v * hs;
  const Eigen::Vector2d dy = y - target;

  double *gbase = grad.data();
  MutMap gwx(gbase, 4 * h, 2), gwh(gbase + 8 * h, 4 * h, h), gv(gbase + 8 * h + 4 * h * h, 2, h);
  gv += dy * hs.transpose();

  Eigen::VectorXd dh = w.v.transpose() * dy;
  Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(h);
  Eigen::VectorXd dz(4 * h);
  for (std::size_t t = cache.size(); t-- > 0;) {
    const StepCache &sc = cache[t];
    const Eigen::VectorXd d_o = dh.cwiseProduct(sc.tc);
    const Eigen::VectorXd dc =
        dc_next + dh.cwiseProduct(sc.o).cwiseProduct((1.0 - sc.tc.array().square()).matrix());
    const Eigen::VectorXd di = dc.cwiseProduct(sc.g);
    const Eigen::VectorXd dg = dc.cwiseProduct(sc.i);
    const Eigen::VectorXd df = dc.cwiseProduct(sc.c_prev);
    dc_next = dc.cwiseProduct(sc.f);
    dz.segment(0, h) = di.array() * sc.i.array() * (1.0 - sc.i.array());
    dz.segment(h, h) = df.array() * sc.f.array() * (1.0 - sc.f.array());
    dz.segment(2 * h, h) = d_o.array() * sc.o.array() * (1.0 - sc.o.array());
    dz.segment(3 * h, h) = dg.array() * (1.0 - sc.g.array().square());
    gwx += dz * inputs[t].transpose();
    gwh += dz * sc.h_prev.transpose();
    dh = w.wh.transpose() * dz;
  }
  return 0.5 * dy.squaredNorm();
}

IncrementState RecurrentModel::predict(const std::deque<TimedSample> &history, long k) const {
  if (history.empty())
    throw std::logic_error("recurrent predict: empty history");
  const TimedSample &last = history.back();
  if (history.size() < 2)
    return last.value;
  const std::size_t n = std::min<std::size_t>(history.size(), static_cast<std::size_t>(history_));
  const std::size_t first = history.size() - n;
  std::vector<Eigen::Vector2d> vel;
  vel.reserve(n - 1);
  for (std::size_t m = first + 1; m < history.size(); ++m) {
    const double dt = static_cast<double>(std::max(1L, history[m].t - history[m - 1].t));
    const IncrementState d = history[m].value - history[m - 1].value;
    vel.emplace_back(d.x1 / (dt * scale_), d.x2 / (dt * scale_));
  }
  const Eigen::Vector2d v = forward(vel) * scale_;
  const double ahead = static_cast<double>(std::max(1L, k - last.t));
  IncrementState out{last.value.x1 + v(0) * ahead, last.value.x2 + v(1) * ahead};
  return out.finite() ? out : last.value;
}

void RecurrentModel::save(std::ostream &os) const {
  const std::uint32_t header[3] = {kVersion, static_cast<std::uint32_t>(hidden_),
                                   static_cast<std::uint32_t>(history_)};
  const std::uint64_t count = static_cast<std::uint64_t>(params_.size());
  os.write(kMagic, sizeof kMagic);
  os.write(reinterpret_cast<const char *>(header), sizeof header);
  os.write(reinterpret_cast<const char *>(&scale_), sizeof scale_);
  os.write(reinterpret_cast<const char *>(&count), sizeof count);
  os.write(reinterpret_cast<const char *>(params_.data()),
           static_cast<std::streamsize>(count * sizeof(double)));
  if (!os)
    throw std::runtime_error("failed to write recurrent model");
}

RecurrentModel RecurrentModel::load(std::istream &is) {
  char magic[8];
  std::uint32_t header[3];
  double scale = 0.0;
  std::uint64_t count = 0;
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw std::runtime_error("not a recurrent model file (bad magic)");
  is.read(reinterpret_cast<char *>(header), sizeof header);
  is.read(reinterpret_cast<char *>(&scale), sizeof scale);
  is.read(reinterpret_cast<char *>(&count), sizeof count);
  if (!is)
    throw std::runtime_error("truncated recurrent model header");
  if (header[0] != kVersion)
    throw std::runtime_error("unsupported recurrent model version " + std::to_string(header[0]));
  RecurrentModel m(static_cast<int>(header[1]), static_cast<int>(header[2]), scale);
  if (count != static_cast<std::uint64_t>(m.params_.size()))
    throw std::runtime_error("recurrent model parameter count does not match hidden size");
  is.read(reinterpret_cast<char *>(m.params_.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!is)
    throw std::runtime_error("truncated recurrent model parameters");
  return m;
}

// ---------------------------------------------------------------------------

namespace {

struct Window {
  std::vector<Eigen::Vector2d> inputs; // raw velocities
  Eigen::Vector2d target;              // raw next velocity
  IncrementState last;
  IncrementState next;
};

std::vector<Window> make_windows(const std::vector<IncrementState> &traj, int history) {
  std::vector<Window> out;
  const int n = static_cast<int>(traj.size());
  for (int s = 0; s + history < n; ++s) {
    Window w;
    for (int m = s + 1; m < s + history; ++m) {
      const IncrementState d = traj[m] - traj[m - 1];
      w.inputs.emplace_back(d.x1, d.x2);
    }
    const IncrementState d = traj[s + history] - traj[s + history - 1];
    w.target = {d.x1, d.x2};
    w.last = traj[s + history - 1];
    w.next = traj[s + history];
    out.push_back(std::move(w));
  }
  return out;
}

} // namespace

RecurrentFit train_recurrent(const std::vector<std::vector<IncrementState>> &trajectories,
                             const RecurrentTraining &hp) {
  if (hp.history < 2)
    throw std::invalid_argument("train_recurrent: history must be at least 2 samples");
  if (hp.hidden < 1 || hp.epochs < 0 || !(hp.learning_rate > 0.0))
    throw std::invalid_argument("train_recurrent: invalid hyperparameters");
  if (trajectories.empty())
    throw std::invalid_argument("train_recurrent: no trajectories");

  std::vector<Window> train, holdout;
  if (trajectories.size() >= 2) {
    for (std::size_t t = 0; t + 1 < trajectories.size(); ++t)
      for (auto &w : make_windows(trajectories[t], hp.history))
        train.push_back(std::move(w));
    holdout = make_windows(trajectories.back(), hp.history);
  } else {
    const auto &traj = trajectories.front();
    const std::size_t cut = traj.size() - traj.size() / 4;
    if (cut <= static_cast<std::size_t>(hp.history) || cut >= traj.size())
      throw std::invalid_argument("train_recurrent: trajectory too short to hold out data");
    train = make_windows({traj.begin(), traj.begin() + static_cast<long>(cut)}, hp.history);
    holdout = make_windows({traj.begin() + static_cast<long>(cut) - hp.history, traj.end()},
                           hp.history);
  }
  if (train.empty() || holdout.empty())
    throw std::invalid_argument("train_recurrent: trajectories must be longer than the history");

  std::mt19937_64 rng(hp.seed);
  if (train.size() > hp.max_windows) {
    std::shuffle(train.begin(), train.end(), rng);
    train.resize(hp.max_windows);
  }

  double scale = 0.0;
  for (const auto &w : train) {
    for (const auto &v : w.inputs)
      scale = std::max(scale, v.cwiseAbs().maxCoeff());
    scale = std::max(scale, w.target.cwiseAbs().maxCoeff());
  }
  if (scale <= 0.0)
    scale = 1.0;

  RecurrentModel model(hp.hidden, hp.history, scale);
  {
    const double bound = 1.0 / std::sqrt(static_cast<double>(hp.hidden));
    for (Eigen::Index j = 0; j < model.params().size(); ++j)
      model.params()(j) = (2.0 * uniform01(rng) - 1.0) * bound;
  }

  std::vector<std::vector<Eigen::Vector2d>> inputs;
  std::vector<Eigen::Vector2d> targets;
  for (const auto &w : train) {
    std::vector<Eigen::Vector2d> in;
    for (const auto &v : w.inputs)
      in.push_back(v / scale);
    inputs.push_back(std::move(in));
    targets.push_back(w.target / scale);
  }

  // Full-batch Adam.
  const Eigen::Index np = model.params().size();
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(np), m2 = Eigen::VectorXd::Zero(np);
  Eigen::VectorXd grad(np);
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  const double inv_n = 1.0 / static_cast<double>(inputs.size());
  for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
    grad.setZero();
    for (std::size_t s = 0; s < inputs.size(); ++s)
      model.loss_and_grad(inputs[s], targets[s], grad);
    grad *= inv_n;
    m1 = b1 * m1 + (1.0 - b1) * grad;
    m2 = b2 * m2 + (1.0 - b2) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(b1, epoch), c2 = 1.0 - std::pow(b2, epoch);
    model.params().array() -=
        hp.learning_rate * (m1.array() / c1) / ((m2.array() / c2).sqrt() + eps);
  }

  double err_model = 0.0, err_hold = 0.0;
  for (const auto &w : holdout) {
    std::vector<Eigen::Vector2d> in;
    for (const auto &v : w.inputs)
      in.push_back(v / scale);
    const Eigen::Vector2d v = model.forward(in) * scale;
    const IncrementState pred{w.last.x1 + v(0), w.last.x2 + v(1)};
    const IncrementState e = pred - w.next, eh = w.last - w.next;
    err_model += e.x1 * e.x1 + e.x2 * e.x2;
    err_hold += eh.x1 * eh.x1 + eh.x2 * eh.x2;
  }
  err_model /= static_cast<double>(holdout.size());
  err_hold /= static_cast<double>(holdout.size());
  if (!(err_model <= err_hold + 1e-15))
    throw std::runtime_error("trained recurrent predictor does not beat hold-last on held-out data");
  return {std::move(model), err_model, err_hold};
}

} // namespace rhpc
