#include "faaslab/agents/rppo.hpp"

#include <algorithm>
#include <cmath>

#include "faaslab/common/error.hpp"
#include "faaslab/nn/categorical.hpp"
#include "faaslab/nn/checkpoint.hpp"
#include "faaslab/nn/init.hpp"

namespace faaslab::agents {

void RppoConfig::validate() const {
  require(lstm_hidden > 0, "lstm_hidden must be positive");
  for (int h : head_hidden) require(h > 0, "head_hidden layers must be positive");
  require(learning_rate > 0.0, "learning_rate must be positive");
  require(clip_eps > 0.0 && clip_eps < 1.0, "clip_eps must lie in (0, 1)");
  require(epochs >= 1, "epochs must be at least 1");
  require(minibatch_episodes >= 0, "minibatch_episodes must be non-negative");
  require(value_coef >= 0.0, "value_coef must be non-negative");
  require(entropy_coef >= 0.0, "entropy_coef must be non-negative");
  require(max_grad_norm > 0.0, "max_grad_norm must be positive");
  require(episodes_per_update >= 1, "episodes_per_update must be at least 1");
  require(reward_scale > 0.0, "reward_scale must be positive");
  require(gae.discount > 0.0 && gae.discount <= 1.0, "gae discount must lie in (0, 1]");
  require(gae.lambda >= 0.0 && gae.lambda <= 1.0, "gae lambda must lie in [0, 1]");
}

RppoNet make_rppo_net(int obs_size, int action_count, const RppoConfig& cfg, Rng& rng) {
  contract(obs_size > 0 && action_count > 1, "rppo net needs an observation and >= 2 actions");
  RppoNet net;
  net.shared = cfg.shared_lstm;
  net.actor_lstm = nn::make_lstm(obs_size, cfg.lstm_hidden, rng);
  if (!net.shared) net.critic_lstm = nn::make_lstm(obs_size, cfg.lstm_hidden, rng);
  net.actor_head = nn::make_mlp(cfg.lstm_hidden, cfg.head_hidden, action_count,
                                nn::Activation::Tanh, std::sqrt(2.0), 0.01, rng);
  net.critic_head = nn::make_mlp(cfg.lstm_hidden, cfg.head_hidden, 1, nn::Activation::Tanh,
                                 std::sqrt(2.0), 1.0, rng);
  return net;
}

RppoGrads make_rppo_grads(const RppoNet& net) {
  RppoGrads g;
  g.actor_lstm = nn::make_lstm_grads(net.actor_lstm);
  if (!net.shared) g.critic_lstm = nn::make_lstm_grads(net.critic_lstm);
  g.actor_head = nn::make_mlp_grads(net.actor_head);
  g.critic_head = nn::make_mlp_grads(net.critic_head);
  return g;
}

void zero_grads(const RppoNet& net, RppoGrads& grads) {
  nn::ParamSet views = rppo_grad_set(net, grads);
  nn::fill_zero(views);
}

nn::ParamSet rppo_param_set(RppoNet& net) {
  nn::ParamSet set;
  if (net.shared) {
    nn::append_params(set, "lstm", net.actor_lstm);
  } else {
    nn::append_params(set, "actor_lstm", net.actor_lstm);
    nn::append_params(set, "critic_lstm", net.critic_lstm);
  }
  nn::append_params(set, "actor_head", net.actor_head);
  nn::append_params(set, "critic_head", net.critic_head);
  return set;
}

nn::ParamSet rppo_grad_set(const RppoNet& net, RppoGrads& grads) {
  nn::ParamSet set;
  if (net.shared) {
    nn::append_grads(set, "lstm", grads.actor_lstm);
  } else {
    nn::append_grads(set, "actor_lstm", grads.actor_lstm);
    nn::append_grads(set, "critic_lstm", grads.critic_lstm);
  }
  nn::append_grads(set, "actor_head", grads.actor_head);
  nn::append_grads(set, "critic_head", grads.critic_head);
  return set;
}

SurrogateStats rppo_loss(const RppoNet& net, std::span<const EpisodeSeq> episodes,
                         const RppoConfig& cfg, RppoGrads* grads) {
  long count = 0;
  for (const auto& ep : episodes) {
    const std::size_t len = ep.observations.size();
    contract(len > 0, "episode sequence must not be empty");
    contract(ep.actions.size() == len && ep.old_log_probs.size() == len &&
                 ep.advantages.size() == len && ep.returns.size() == len,
             "episode sequence fields must have equal length");
    count += static_cast<long>(len);
  }
  contract(count > 0, "loss needs at least one step");
  const double inv_count = 1.0 / static_cast<double>(count);

  SurrogateStats stats;
  stats.samples = count;
  long clipped_samples = 0;

  for (const auto& ep : episodes) {
    const std::size_t len = ep.observations.size();
    LstmRun actor_run =
        lstm_forward_seq(net.actor_lstm, ep.observations, nn::lstm_initial_state(net.actor_lstm));
    HeadRun actor_out = head_forward_seq(net.actor_head, actor_run.hidden);

    LstmRun critic_run;
    const std::vector<nn::Vec>* critic_hidden = &actor_run.hidden;
    if (!net.shared) {
      critic_run = lstm_forward_seq(net.critic_lstm, ep.observations,
                                    nn::lstm_initial_state(net.critic_lstm));
      critic_hidden = &critic_run.hidden;
    }
    HeadRun critic_out = head_forward_seq(net.critic_head, *critic_hidden);

    std::vector<nn::Vec> dlogits(len), dvalue(len);
    for (std::size_t t = 0; t < len; ++t) {
      const nn::Vec& logits = actor_out.out[t];
      const nn::Vec lp = nn::log_softmax(logits);
      nn::Vec p(lp.size());
      for (std::size_t k = 0; k < lp.size(); ++k) p[k] = std::exp(lp[k]);

      const int a = ep.actions[t];
      contract(a >= 0 && a < static_cast<int>(lp.size()), "stored action out of range");
      const double adv = ep.advantages[t];
      const double ratio = std::exp(lp[a] - ep.old_log_probs[t]);
      const double clipped_ratio = std::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps);
      const double unclipped = ratio * adv;
      const double clipped = clipped_ratio * adv;
      stats.policy_loss -= std::min(unclipped, clipped);
      if (std::abs(ratio - 1.0) > cfg.clip_eps) ++clipped_samples;
      stats.approx_kl += ep.old_log_probs[t] - lp[a];

      double h = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) h -= p[k] * lp[k];
      stats.entropy += h;

      const double v = critic_out.out[t][0];
      const double verr = v - ep.returns[t];
      stats.value_loss += verr * verr;

      if (grads != nullptr) {
        // min(r A, clip(r) A): gradient flows only through the unclipped
        // branch, and only while it is the smaller of the two.
        const double coef = (clipped < unclipped) ? 0.0 : -adv * ratio;
        nn::Vec dz(p.size(), 0.0);
        for (std::size_t k = 0; k < p.size(); ++k) {
          const double indicator = (static_cast<int>(k) == a) ? 1.0 : 0.0;
          dz[k] = coef * (indicator - p[k]) * inv_count;
          dz[k] += cfg.entropy_coef * p[k] * (lp[k] + h) * inv_count;
        }
        dlogits[t] = std::move(dz);
        dvalue[t] = nn::Vec{2.0 * cfg.value_coef * verr * inv_count};
      }
    }

    if (grads != nullptr) {
      std::vector<nn::Vec> dh_actor =
          head_backward_seq(net.actor_head, actor_out, dlogits, grads->actor_head);
      std::vector<nn::Vec> dh_critic =
          head_backward_seq(net.critic_head, critic_out, dvalue, grads->critic_head);
      if (net.shared) {
        for (std::size_t t = 0; t < len; ++t) nn::add_in_place(dh_actor[t], dh_critic[t]);
        nn::lstm_bptt(net.actor_lstm, actor_run.steps, dh_actor, grads->actor_lstm);
      } else {
        nn::lstm_bptt(net.actor_lstm, actor_run.steps, dh_actor, grads->actor_lstm);
        nn::lstm_bptt(net.critic_lstm, critic_run.steps, dh_critic, grads->critic_lstm);
      }
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

RppoAgent::RppoAgent(int obs_size, int action_count, RppoConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)),
      adam_(0, nn::AdamConfig{}),
      rng_(derive_seed(seed, 0x7270706fULL)) {
  cfg_.validate();
  net_ = make_rppo_net(obs_size, action_count, cfg_, rng_);
  grads_ = make_rppo_grads(net_);
  params_ = rppo_param_set(net_);
  grad_views_ = rppo_grad_set(net_, grads_);
  adam_ = nn::AdamState(nn::total_size(params_), nn::AdamConfig{cfg_.learning_rate});
  begin_episode();
}

void RppoAgent::begin_episode() {
  actor_state_ = nn::lstm_initial_state(net_.actor_lstm);
  if (!net_.shared) critic_state_ = nn::lstm_initial_state(net_.critic_lstm);
}

RppoAgent::PolicyStep RppoAgent::policy_step(const nn::Vec& obs, bool greedy) {
  nn::lstm_step(net_.actor_lstm, obs, actor_state_, nullptr);
  const nn::Vec logits = nn::mlp_forward(net_.actor_head, actor_state_.h, nullptr);
  const nn::Vec lp = nn::log_softmax(logits);

  PolicyStep out;
  if (greedy) {
    out.action = nn::argmax(lp);
  } else {
    nn::Vec p(lp.size());
    for (std::size_t k = 0; k < lp.size(); ++k) p[k] = std::exp(lp[k]);
    out.action = nn::categorical_sample(p, rng_);
  }
  out.log_prob = lp[out.action];

  const nn::Vec* h = &actor_state_.h;
  if (!net_.shared) {
    nn::lstm_step(net_.critic_lstm, obs, critic_state_, nullptr);
    h = &critic_state_.h;
  }
  out.value = nn::mlp_forward(net_.critic_head, *h, nullptr)[0];
  return out;
}

int RppoAgent::act(const std::vector<double>& observation, bool greedy) {
  nn::lstm_step(net_.actor_lstm, observation, actor_state_, nullptr);
  const nn::Vec logits = nn::mlp_forward(net_.actor_head, actor_state_.h, nullptr);
  if (greedy) return nn::argmax(logits);
  const nn::Vec p = nn::softmax(logits);
  return nn::categorical_sample(p, rng_);
}

TrainUpdateStats RppoAgent::update_once(RolloutEnv& env) {
  std::vector<EpisodeSeq> episodes;
  episodes.reserve(cfg_.episodes_per_update);
  std::vector<double> rewards, values;
  std::vector<unsigned char> dones;
  double raw_reward_sum = 0.0;

  for (int e = 0; e < cfg_.episodes_per_update; ++e) {
    EpisodeSeq seq;
    begin_episode();
    nn::Vec obs = env.reset();
    bool done = false;
    while (!done) {
      const PolicyStep ps = policy_step(obs, /*greedy=*/false);
      const RolloutEnv::Step st = env.step(ps.action);
      seq.observations.push_back(obs);
      seq.actions.push_back(ps.action);
      seq.old_log_probs.push_back(ps.log_prob);
      rewards.push_back(st.reward * cfg_.reward_scale);
      values.push_back(ps.value);
      dones.push_back(st.done ? 1 : 0);
      raw_reward_sum += st.reward;
      ++env_steps_;
      done = st.done;
      obs = st.observation;
      contract(seq.observations.size() < 1000000, "episode without termination");
    }
    episodes.push_back(std::move(seq));
  }

  std::vector<double> advantages, returns;
  compute_gae(rewards, values, dones, 0.0, cfg_.gae, advantages, returns);
  normalize_in_place(advantages);
  std::size_t at = 0;
  for (auto& ep : episodes) {
    const std::size_t len = ep.observations.size();
    ep.advantages.assign(advantages.begin() + at, advantages.begin() + at + len);
    ep.returns.assign(returns.begin() + at, returns.begin() + at + len);
    at += len;
  }

  const int total = static_cast<int>(episodes.size());
  const int chunk = cfg_.minibatch_episodes > 0 ? std::min(cfg_.minibatch_episodes, total) : total;
  std::vector<int> order(episodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  TrainUpdateStats out;
  double weight = 0.0;
  for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng_);
    for (int begin = 0; begin < total; begin += chunk) {
      const int end = std::min(begin + chunk, total);
      std::vector<EpisodeSeq> batch;
      batch.reserve(end - begin);
      for (int i = begin; i < end; ++i) batch.push_back(episodes[order[i]]);

      zero_grads(net_, grads_);
      const SurrogateStats s = rppo_loss(net_, batch, cfg_, &grads_);
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
  out.mean_episode_reward_raw = raw_reward_sum / static_cast<double>(episodes.size());
  return out;
}

long RppoAgent::train(RolloutEnv& env, long env_step_budget, const TrainLog& log) {
  const long start = env_steps_;
  while (env_steps_ - start < env_step_budget) {
    const TrainUpdateStats stats = update_once(env);
    if (log) log(stats);
  }
  return env_steps_ - start;
}

void RppoAgent::save(const std::filesystem::path& path) const {
  nn::save_checkpoint(path, "rppo", params_);
}

void RppoAgent::load(const std::filesystem::path& path) {
  nn::load_checkpoint(path, "rppo", params_);
}

}  // namespace faaslab::agents
