#include "faaslab/agents/drqn.hpp"

#include <algorithm>
#include <cmath>

#include "faaslab/common/error.hpp"
#include "faaslab/nn/categorical.hpp"
#include "faaslab/nn/checkpoint.hpp"

namespace faaslab::agents {

void DrqnConfig::validate() const {
  require(lstm_hidden > 0, "lstm_hidden must be positive");
  for (int h : head_hidden) require(h > 0, "head_hidden layers must be positive");
  require(learning_rate > 0.0, "learning_rate must be positive");
  require(discount > 0.0 && discount <= 1.0, "discount must lie in (0, 1]");
  require(sequence_length >= 1, "sequence_length must be at least 1");
  require(burn_in >= 0 && burn_in < sequence_length, "burn_in must be shorter than the sequence");
  require(replay_capacity >= 1, "replay_capacity must be at least 1");
  require(min_replay_episodes >= 1, "min_replay_episodes must be at least 1");
  require(min_replay_episodes <= replay_capacity, "min_replay_episodes exceeds capacity");
  require(batch_size >= 1, "batch_size must be at least 1");
  require(gradient_steps_per_episode >= 0, "gradient_steps_per_episode must be non-negative");
  require(target_sync_every >= 1, "target_sync_every must be at least 1");
  require(epsilon_start >= 0.0 && epsilon_start <= 1.0, "epsilon_start must lie in [0, 1]");
  require(epsilon_end >= 0.0 && epsilon_end <= epsilon_start,
          "epsilon_end must lie in [0, epsilon_start]");
  require(epsilon_decay_steps >= 1, "epsilon_decay_steps must be at least 1");
  require(huber_delta > 0.0, "huber_delta must be positive");
  require(max_grad_norm > 0.0, "max_grad_norm must be positive");
  require(reward_scale > 0.0, "reward_scale must be positive");
}

DrqnNet make_drqn_net(int obs_size, int action_count, const DrqnConfig& cfg, Rng& rng) {
  contract(obs_size > 0 && action_count > 1, "drqn net needs an observation and >= 2 actions");
  DrqnNet net;
  net.lstm = nn::make_lstm(obs_size, cfg.lstm_hidden, rng);
  net.head = nn::make_mlp(cfg.lstm_hidden, cfg.head_hidden, action_count, nn::Activation::Relu,
                          std::sqrt(2.0), 1.0, rng);
  return net;
}

DrqnGrads make_drqn_grads(const DrqnNet& net) {
  return DrqnGrads{nn::make_lstm_grads(net.lstm), nn::make_mlp_grads(net.head)};
}

void zero_grads(const DrqnNet& net, DrqnGrads& grads) {
  nn::ParamSet views = drqn_grad_set(net, grads);
  nn::fill_zero(views);
}

nn::ParamSet drqn_param_set(DrqnNet& net) {
  nn::ParamSet set;
  nn::append_params(set, "lstm", net.lstm);
  nn::append_params(set, "head", net.head);
  return set;
}

nn::ParamSet drqn_grad_set(const DrqnNet& net, DrqnGrads& grads) {
  (void)net;
  nn::ParamSet set;
  nn::append_grads(set, "lstm", grads.lstm);
  nn::append_grads(set, "head", grads.head);
  return set;
}

void StoredEpisode::check() const {
  contract(!actions.empty(), "stored episode must hold at least one transition");
  contract(observations.size() == actions.size() + 1,
           "stored episode needs one observation more than transitions");
  contract(rewards.size() == actions.size() && done.size() == actions.size(),
           "stored episode fields must have equal length");
}

EpisodeReplay::EpisodeReplay(long capacity) : capacity_(capacity) {
  contract(capacity >= 1, "replay capacity must be at least 1");
}

void EpisodeReplay::push(StoredEpisode episode) {
  episode.check();
  episodes_.push_back(std::move(episode));
  while (static_cast<long>(episodes_.size()) > capacity_) episodes_.pop_front();
}

double drqn_loss(const DrqnNet& online, const DrqnNet& target,
                 std::span<const SequenceSlice> batch, const DrqnConfig& cfg, DrqnGrads* grads) {
  long count = 0;
  for (const auto& slice : batch) {
    contract(slice.episode != nullptr, "slice must reference an episode");
    contract(slice.start >= 0 && slice.length >= 1 &&
                 slice.start + slice.length <= slice.episode->steps(),
             "slice window out of episode range");
    const int burn = std::min(cfg.burn_in, slice.length - 1);
    count += slice.length - burn;
  }
  contract(count > 0, "loss needs at least one learning step");
  const double inv_count = 1.0 / static_cast<double>(count);

  double loss = 0.0;
  for (const auto& slice : batch) {
    const StoredEpisode& ep = *slice.episode;
    const int burn = std::min(cfg.burn_in, slice.length - 1);

    const std::span<const nn::Vec> online_obs(ep.observations.data() + slice.start,
                                              static_cast<std::size_t>(slice.length));
    // The target net sees one extra trailing observation: its output at
    // position i + 1 scores the state after transition start + i.
    const std::span<const nn::Vec> target_obs(ep.observations.data() + slice.start,
                                              static_cast<std::size_t>(slice.length) + 1);

    LstmRun online_run =
        lstm_forward_seq(online.lstm, online_obs, nn::lstm_initial_state(online.lstm));
    HeadRun online_out = head_forward_seq(online.head, online_run.hidden);
    LstmRun target_run =
        lstm_forward_seq(target.lstm, target_obs, nn::lstm_initial_state(target.lstm));
    HeadRun target_out = head_forward_seq(target.head, target_run.hidden);

    std::vector<nn::Vec> dout(static_cast<std::size_t>(slice.length),
                              nn::Vec(static_cast<std::size_t>(online.head.out_size()), 0.0));
    for (int i = burn; i < slice.length; ++i) {
      const int t = slice.start + i;
      const int a = ep.actions[t];
      contract(a >= 0 && a < online.head.out_size(), "stored action out of range");
      const double next_q = target_out.out[i + 1][nn::argmax(target_out.out[i + 1])];
      const double live = ep.done[t] ? 0.0 : 1.0;
      const double y = ep.rewards[t] + cfg.discount * live * next_q;
      const double e = online_out.out[i][a] - y;
      if (std::abs(e) <= cfg.huber_delta) {
        loss += 0.5 * e * e;
        dout[i][a] = e * inv_count;
      } else {
        loss += cfg.huber_delta * (std::abs(e) - 0.5 * cfg.huber_delta);
        dout[i][a] = (e > 0.0 ? cfg.huber_delta : -cfg.huber_delta) * inv_count;
      }
    }

    if (grads != nullptr) {
      std::vector<nn::Vec> dh = head_backward_seq(online.head, online_out, dout, grads->head);
      nn::lstm_bptt(online.lstm, online_run.steps, dh, grads->lstm);
    }
  }
  return loss * inv_count;
}

DrqnAgent::DrqnAgent(int obs_size, int action_count, DrqnConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)),
      adam_(0, nn::AdamConfig{}),
      rng_(derive_seed(seed, 0x6472716eULL)),
      replay_(1) {
  cfg_.validate();
  online_ = make_drqn_net(obs_size, action_count, cfg_, rng_);
  target_ = online_;
  grads_ = make_drqn_grads(online_);
  params_ = drqn_param_set(online_);
  target_params_ = drqn_param_set(target_);
  grad_views_ = drqn_grad_set(online_, grads_);
  adam_ = nn::AdamState(nn::total_size(params_), nn::AdamConfig{cfg_.learning_rate});
  replay_ = EpisodeReplay(cfg_.replay_capacity);
  begin_episode();
}

void DrqnAgent::begin_episode() { act_state_ = nn::lstm_initial_state(online_.lstm); }

double DrqnAgent::epsilon() const {
  const double frac =
      std::min(1.0, static_cast<double>(env_steps_) / static_cast<double>(cfg_.epsilon_decay_steps));
  return cfg_.epsilon_start + (cfg_.epsilon_end - cfg_.epsilon_start) * frac;
}

int DrqnAgent::act(const std::vector<double>& observation, bool greedy) {
  nn::lstm_step(online_.lstm, observation, act_state_, nullptr);
  const nn::Vec q = nn::mlp_forward(online_.head, act_state_.h, nullptr);
  if (greedy) return nn::argmax(q);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng_) < epsilon()) {
    std::uniform_int_distribution<int> pick(0, online_.head.out_size() - 1);
    return pick(rng_);
  }
  return nn::argmax(q);
}

TrainUpdateStats DrqnAgent::episode_step(RolloutEnv& env) {
  StoredEpisode ep;
  begin_episode();
  nn::Vec obs = env.reset();
  ep.observations.push_back(obs);
  double raw_reward = 0.0;
  bool done = false;
  while (!done) {
    const int action = act(obs, /*greedy=*/false);
    const RolloutEnv::Step st = env.step(action);
    ep.actions.push_back(action);
    ep.rewards.push_back(st.reward * cfg_.reward_scale);
    ep.done.push_back(st.done ? 1 : 0);
    ep.observations.push_back(st.observation);
    raw_reward += st.reward;
    ++env_steps_;
    done = st.done;
    obs = st.observation;
    contract(ep.actions.size() < 1000000, "episode without termination");
  }
  replay_.push(std::move(ep));

  TrainUpdateStats out;
  double loss_sum = 0.0;
  long loss_n = 0;
  for (int g = 0; g < cfg_.gradient_steps_per_episode; ++g) {
    if (const std::optional<double> l = gradient_step()) {
      loss_sum += *l;
      ++loss_n;
    }
  }
  out.loss = loss_n > 0 ? loss_sum / static_cast<double>(loss_n) : 0.0;
  out.value_loss = out.loss;
  out.epsilon = epsilon();
  out.env_steps = env_steps_;
  out.mean_episode_reward_raw = raw_reward;
  return out;
}

std::optional<double> DrqnAgent::gradient_step() {
  if (replay_.size() < cfg_.min_replay_episodes) return std::nullopt;

  std::vector<SequenceSlice> batch;
  batch.reserve(cfg_.batch_size);
  std::uniform_int_distribution<long> pick_episode(0, replay_.size() - 1);
  for (int b = 0; b < cfg_.batch_size; ++b) {
    const StoredEpisode& ep = replay_.at(pick_episode(rng_));
    const int len = static_cast<int>(std::min<long>(cfg_.sequence_length, ep.steps()));
    std::uniform_int_distribution<int> pick_start(0, static_cast<int>(ep.steps()) - len);
    batch.push_back(SequenceSlice{&ep, pick_start(rng_), len});
  }

  zero_grads(online_, grads_);
  const double loss = drqn_loss(online_, target_, batch, cfg_, &grads_);
  if (!std::isfinite(loss)) {
    throw TrainingError("q update produced a non-finite loss; aborting before the step");
  }
  nn::clip_global_norm(grad_views_, cfg_.max_grad_norm);
  adam_.update(params_, grad_views_);
  ++grad_steps_;
  if (grad_steps_ % cfg_.target_sync_every == 0) sync_target();
  return loss;
}

void DrqnAgent::sync_target() { nn::copy_values(params_, target_params_); }

long DrqnAgent::train(RolloutEnv& env, long env_step_budget, const TrainLog& log) {
  const long start = env_steps_;
  while (env_steps_ - start < env_step_budget) {
    const TrainUpdateStats stats = episode_step(env);
    if (log) log(stats);
  }
  return env_steps_ - start;
}

void DrqnAgent::save(const std::filesystem::path& path) const {
  nn::save_checkpoint(path, "drqn", params_);
}

void DrqnAgent::load(const std::filesystem::path& path) {
  nn::load_checkpoint(path, "drqn", params_);
  sync_target();
}

}  // namespace faaslab::agents
