#include "faaslab/agents/ppo.hpp"

#include <algorithm>
#include <cmath>

#include "faaslab/common/error.hpp"
#include "faaslab/nn/categorical.hpp"
#include "faaslab/nn/checkpoint.hpp"

namespace faaslab::agents {

void PpoConfig::validate() const {
  for (int h : hidden) require(h > 0, "hidden layers must be positive");
  require(learning_rate > 0.0, "learning_rate must be positive");
  require(clip_eps > 0.0 && clip_eps < 1.0, "clip_eps must lie in (0, 1)");
  require(epochs >= 1, "epochs must be at least 1");
  require(minibatch_size >= 0, "minibatch_size must be non-negative");
  require(value_coef >= 0.0, "value_coef must be non-negative");
  require(entropy_coef >= 0.0, "entropy_coef must be non-negative");
  require(max_grad_norm > 0.0, "max_grad_norm must be positive");
  require(steps_per_update >= 1, "steps_per_update must be at least 1");
  require(reward_scale > 0.0, "reward_scale must be positive");
  require(gae.discount > 0.0 && gae.discount <= 1.0, "gae discount must lie in (0, 1]");
  require(gae.lambda >= 0.0 && gae.lambda <= 1.0, "gae lambda must lie in [0, 1]");
}

PpoNet make_ppo_net(int obs_size, int action_count, const PpoConfig& cfg, Rng& rng) {
  contract(obs_size > 0 && action_count > 1, "ppo net needs an observation and >= 2 actions");
  PpoNet net;
  net.actor = nn::make_mlp(obs_size, cfg.hidden, action_count, nn::Activation::Tanh,
                           std::sqrt(2.0), 0.01, rng);
  net.critic =
      nn::make_mlp(obs_size, cfg.hidden, 1, nn::Activation::Tanh, std::sqrt(2.0), 1.0, rng);
  return net;
}

PpoGrads make_ppo_grads(const PpoNet& net) {
  return PpoGrads{nn::make_mlp_grads(net.actor), nn::make_mlp_grads(net.critic)};
}

void zero_grads(const PpoNet& net, PpoGrads& grads) {
  nn::ParamSet views = ppo_grad_set(net, grads);
  nn::fill_zero(views);
}

nn::ParamSet ppo_param_set(PpoNet& net) {
  nn::ParamSet set;
  nn::append_params(set, "actor", net.actor);
  nn::append_params(set, "critic", net.critic);
  return set;
}

nn::ParamSet ppo_grad_set(const PpoNet& net, PpoGrads& grads) {
  (void)net;
  nn::ParamSet set;
  nn::append_grads(set, "actor", grads.actor);
  nn::append_grads(set, "critic", grads.critic);
  return set;
}

SurrogateStats ppo_loss(const PpoNet& net, const StepBatch& batch, std::span<const int> rows,
                        const PpoConfig& cfg, PpoGrads* grads) {
  contract(!rows.empty(), "loss needs at least one row");
  contract(batch.actions.size() == batch.size() && batch.old_log_probs.size() == batch.size() &&
               batch.advantages.size() == batch.size() && batch.returns.size() == batch.size(),
           "step batch fields must have equal length");
  const double inv_count = 1.0 / static_cast<double>(rows.size());

  SurrogateStats stats;
  stats.samples = static_cast<long>(rows.size());
  long clipped_samples = 0;

  for (int row : rows) {
    contract(row >= 0 && row < static_cast<int>(batch.size()), "row index out of range");
    const nn::Vec& obs = batch.observations[row];

    nn::MlpCache actor_cache, critic_cache;
    const nn::Vec logits =
        nn::mlp_forward(net.actor, obs, grads != nullptr ? &actor_cache : nullptr);
    const nn::Vec value_out =
        nn::mlp_forward(net.critic, obs, grads != nullptr ? &critic_cache : nullptr);

    const nn::Vec lp = nn::log_softmax(logits);
    nn::Vec p(lp.size());
    for (std::size_t k = 0; k < lp.size(); ++k) p[k] = std::exp(lp[k]);

    const int a = batch.actions[row];
    contract(a >= 0 && a < static_cast<int>(lp.size()), "stored action out of range");
    const double adv = batch.advantages[row];
    const double ratio = std::exp(lp[a] - batch.old_log_probs[row]);
    const double clipped_ratio = std::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps);
    const double unclipped = ratio * adv;
    const double clipped = clipped_ratio * adv;
    stats.policy_loss -= std::min(unclipped, clipped);
    if (std::abs(ratio - 1.0) > cfg.clip_eps) ++clipped_samples;
    stats.approx_kl += batch.old_log_probs[row] - lp[a];

    double h = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) h -= p[k] * lp[k];
    stats.entropy += h;

    const double v = value_out[0];
    const double verr = v - batch.returns[row];
    stats.value_loss += verr * verr;

    if (grads != nullptr) {
      const double coef = (clipped < unclipped) ? 0.0 : -adv * ratio;
      nn::Vec dz(p.size(), 0.0);
      for (std::size_t k = 0; k < p.size(); ++k) {
        const double indicator = (static_cast<int>(k) == a) ? 1.0 : 0.0;
        dz[k] = coef * (indicator - p[k]) * inv_count;
        dz[k] += cfg.entropy_coef * p[k] * (lp[k] + h) * inv_count;
      }
      nn::mlp_backward(net.actor, actor_cache, dz, grads->actor);
      const nn::Vec dv{2.0 * cfg.value_coef * verr * inv_count};
      nn::mlp_backward(net.critic, critic_cache, dv, grads->critic);
    }
  }

  stats.policy_loss *= inv_count;
  stats.value_loss *= inv_count;
  stats.entropy *= inv_count;
  stats.approx_kl *= inv_count;
  stats.clip_fraction = static_cast<double>(clipped_samples) * inv_count;
  stats.total = stats.policy_loss + cfg.value_coef * stats.value_loss -
                cfg.entropy_coef * stats.entropy;
  return stats;
}

PpoAgent::PpoAgent(int obs_size, int action_count, PpoConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)),
      adam_(0, nn::AdamConfig{}),
      rng_(derive_seed(seed, 0x70706f66ULL)) {
  cfg_.validate();
  net_ = make_ppo_net(obs_size, action_count, cfg_, rng_);
  grads_ = make_ppo_grads(net_);
  params_ = ppo_param_set(net_);
  grad_views_ = ppo_grad_set(net_, grads_);
  adam_ = nn::AdamState(nn::total_size(params_), nn::AdamConfig{cfg_.learning_rate});
}

int PpoAgent::act(const std::vector<double>& observation, bool greedy) {
  const nn::Vec logits = nn::mlp_forward(net_.actor, observation, nullptr);
  if (greedy) return nn::argmax(logits);
  const nn::Vec p = nn::softmax(logits);
  return nn::categorical_sample(p, rng_);
}

TrainUpdateStats PpoAgent::update_once(RolloutEnv& env) {
  StepBatch batch;
  std::vector<double> rewards, values;
  std::vector<unsigned char> dones;
  double finished_reward_sum = 0.0;
  long finished_episodes = 0;

  if (!episode_open_) {
    pending_obs_ = env.reset();
    episode_open_ = true;
    open_episode_reward_ = 0.0;
  }
  bool last_done = false;
  for (int i = 0; i < cfg_.steps_per_update; ++i) {
    const nn::Vec obs = pending_obs_;
    const nn::Vec logits = nn::mlp_forward(net_.actor, obs, nullptr);
    const nn::Vec lp = nn::log_softmax(logits);
    nn::Vec p(lp.size());
    for (std::size_t k = 0; k < lp.size(); ++k) p[k] = std::exp(lp[k]);
    const int action = nn::categorical_sample(p, rng_);
    const double value = nn::mlp_forward(net_.critic, obs, nullptr)[0];

    const RolloutEnv::Step st = env.step(action);
    batch.observations.push_back(obs);
    batch.actions.push_back(action);
    batch.old_log_probs.push_back(lp[action]);
    rewards.push_back(st.reward * cfg_.reward_scale);
    values.push_back(value);
    dones.push_back(st.done ? 1 : 0);
    open_episode_reward_ += st.reward;
    ++env_steps_;
    last_done = st.done;

    if (st.done) {
      finished_reward_sum += open_episode_reward_;
      ++finished_episodes;
      open_episode_reward_ = 0.0;
      pending_obs_ = env.reset();
    } else {
      pending_obs_ = st.observation;
    }
  }

  double bootstrap = 0.0;
  if (!last_done) {
    bootstrap = nn::mlp_forward(net_.critic, pending_obs_, nullptr)[0];
  }
  compute_gae(rewards, values, dones, bootstrap, cfg_.gae, batch.advantages, batch.returns);
  normalize_in_place(batch.advantages);

  const int total = static_cast<int>(batch.size());
  const int chunk = cfg_.minibatch_size > 0 ? std::min(cfg_.minibatch_size, total) : total;
  std::vector<int> order(batch.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  TrainUpdateStats out;
  double weight = 0.0;
  for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng_);
    for (int begin = 0; begin < total; begin += chunk) {
      const int end = std::min(begin + chunk, total);
      const std::span<const int> rows(order.data() + begin, static_cast<std::size_t>(end - begin));

      zero_grads(net_, grads_);
      const SurrogateStats s = ppo_loss(net_, batch, rows, cfg_, &grads_);
      if (!std::isfinite(s.total)) {
        throw TrainingError("policy update produced a non-finite loss; aborting before the step");
      }
      nn::clip_global_norm(grad_views_, cfg_.max_grad_norm);
      adam_.update(params_, grad_views_);

      const double w = static_cast<double>(s.samples);
      out.loss += s.total * w;
      out.policy_loss += s.policy_loss * w;
      out.value_loss += s.value_loss * w;
      out.entropy += s.entropy * w;
      out.clip_fraction += s.clip_fraction * w;
      out.approx_kl += s.approx_kl * w;
      weight += w;
    }
  }
  out.loss /= weight;
  out.policy_loss /= weight;
  out.value_loss /= weight;
  out.entropy /= weight;
  out.clip_fraction /= weight;
  out.approx_kl /= weight;
  out.env_steps = env_steps_;
  out.mean_episode_reward_raw =
      finished_episodes > 0 ? finished_reward_sum / static_cast<double>(finished_episodes) : 0.0;
  return out;
}

long PpoAgent::train(RolloutEnv& env, long env_step_budget, const TrainLog& log) {
  const long start = env_steps_;
  while (env_steps_ - start < env_step_budget) {
    const TrainUpdateStats stats = update_once(env);
    if (log) log(stats);
  }
  return env_steps_ - start;
}

void PpoAgent::save(const std::filesystem::path& path) const {
  nn::save_checkpoint(path, "ppo", params_);
}

void PpoAgent::load(const std::filesystem::path& path) {
  nn::load_checkpoint(path, "ppo", params_);
}

}  // namespace faaslab::agents
