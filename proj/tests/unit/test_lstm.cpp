#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numeric>

#include "../oracles/finite_difference.hpp"
#include "fakenews/hash.hpp"
#include "fakenews/lstm.hpp"
#include "../support/models.hpp"

namespace fakenews {
namespace {

using models::random_embedding;
using models::sequence;
using models::tiny_config;
using models::tiny_net;

double max_gradient_error(LstmNetwork& net, const TokenSequence& seq, Label label) {
  return models::max_gradient_error(net, seq, label).error;
}

TEST(LstmGradient, MatchesFiniteDifferencesOnFullSequence) {
  for (std::uint64_t seed : {1, 2, 3}) {
    auto net = tiny_net(seed);
    const auto seq = sequence({1, 2, 3, 4, 5, 6, 1, 2}, 8);
    EXPECT_LT(max_gradient_error(net, seq, seed % 2 ? Label::Fake : Label::Real), 1e-4);
  }
}

TEST(LstmGradient, MatchesFiniteDifferencesWithPaddingMask) {
  auto net = tiny_net(4);
  const auto seq = sequence({3, 1, 5}, 8);
  EXPECT_LT(max_gradient_error(net, seq, Label::Fake), 1e-4);
}

TEST(LstmGradient, MatchesFiniteDifferencesWithoutMask) {
  auto config = tiny_config();
  config.mask_padding = false;
  LstmNetwork base = tiny_net(5);
  LstmNetwork net(config, base.embedding_ptr(), base.params());
  EXPECT_LT(max_gradient_error(net, sequence({2, 4, 6}, 8), Label::Real), 1e-4);
}

TEST(LstmGradient, MatchesFiniteDifferencesWithActiveCellClip) {
  auto config = tiny_config();
  config.cell_clip = 0.05;
  LstmNetwork base = tiny_net(6);
  LstmNetwork net(config, base.embedding_ptr(), base.params());
  const auto seq = sequence({1, 2, 3, 4, 5, 6, 1, 2}, 8);
  const auto fwd = forward(net, seq, false);
  ASSERT_GT((fwd.cache.l1.cell.array().abs() >= 0.05).count(), 0);
  EXPECT_LT(max_gradient_error(net, seq, Label::Fake), 1e-4);
}

TEST(LstmForward, CellStateStaysWithinClip) {
  auto config = tiny_config();
  config.cell_clip = 0.1;
  LstmNetwork base = tiny_net(7);
  auto params = base.params();
  params.lstm1.b.setConstant(3.0);
  params.lstm2.b.setConstant(3.0);
  LstmNetwork net(config, base.embedding_ptr(), params);
  const auto fwd = forward(net, sequence({1, 2, 3, 4, 5, 6, 1, 2}, 8), false);
  EXPECT_LE(fwd.cache.l1.cell.array().abs().maxCoeff(), 0.1);
  EXPECT_LE(fwd.cache.l2.cell.array().abs().maxCoeff(), 0.1);
  EXPECT_DOUBLE_EQ(fwd.cache.l1.cell.array().abs().maxCoeff(), 0.1);
}

TEST(LstmGradient, ZeroWhenPredictionMatchesLabel) {
  LstmNetwork net = tiny_net(6);
  auto& p = net.params();
  p.dense3_w.setZero();
  p.dense3_b(0) = 800.0;  // sigmoid saturates to exactly 1
  const auto fwd = forward(net, sequence({1, 2, 3}, 8), false);
  ASSERT_EQ(fwd.probability, 1.0);
  const auto grad = backward(net, fwd.cache, Label::Fake);
  EXPECT_EQ(grad.squared_norm(), 0.0);
}

TEST(LstmForward, ZeroWeightsGiveOneHalf) {
  LstmNetwork net = tiny_net(7);
  net.params().set_zero();
  EXPECT_DOUBLE_EQ(predict_proba(net, sequence({1, 2, 3, 4}, 8)), 0.5);
}

TEST(LstmForward, AllPaddingConvOutputIsReluOfBias) {
  LstmNetwork net = tiny_net(8);
  net.params().conv_b << 0.3, -0.2, 0.1;
  const auto fwd = forward(net, sequence({}, 8), false);
  EXPECT_TRUE(fwd.cache.uniform_attention);
  for (Eigen::Index t = 0; t < fwd.cache.conv_pre.rows(); ++t) {
    EXPECT_DOUBLE_EQ(fwd.cache.pooled(t / 2, 0), 0.3);
    EXPECT_DOUBLE_EQ(fwd.cache.pooled(t / 2, 1), 0.0);
    EXPECT_DOUBLE_EQ(fwd.cache.pooled(t / 2, 2), 0.1);
  }
  EXPECT_TRUE(extract_token_contributions(net, sequence({}, 8)).empty());
}

TEST(LstmForward, InferenceIsDeterministic) {
  LstmNetwork net = tiny_net(9);
  const auto seq = sequence({1, 5, 2}, 8);
  EXPECT_EQ(forward(net, seq, false).probability, forward(net, seq, false).probability);
}

TEST(LstmForward, RejectsWrongLength) {
  LstmNetwork net = tiny_net(10);
  EXPECT_THROW(forward(net, sequence({1}, 7), false), InputError);
}

TEST(LstmForward, AttentionIsNormalized) {
  LstmNetwork net = tiny_net(11);
  const auto fwd = forward(net, sequence({1, 2, 3, 4, 5}, 8), false);
  EXPECT_NEAR(fwd.attention.sum(), 1.0, 1e-9);
  EXPECT_GE(fwd.attention.minCoeff(), 0.0);
  // Step 3 covers only padding and is masked out.
  EXPECT_EQ(fwd.attention(3), 0.0);
}

TEST(LstmForward, DropoutAveragesToInference) {
  auto config = tiny_config();
  config.dropout = 0.3;
  LstmNetwork base = tiny_net(12);
  LstmNetwork net(config, base.embedding_ptr(), base.params());
  const auto seq = sequence({1, 2, 3, 4, 5, 6}, 8);
  Rng rng(12, "dropout");
  // Compare the pre-activation conv output, which is linear in the mask.
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(8, 3);
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) mean += forward(net, seq, true, &rng).cache.conv_pre;
  mean /= draws;
  const auto clean = forward(net, seq, false).cache.conv_pre;
  EXPECT_LT((mean - clean).cwiseAbs().maxCoeff(), 0.03);
}

TEST(LstmContributions, UniformAttentionSplitsEvenly) {
  LstmNetwork net = tiny_net(13);
  net.params().attn_w.setZero();
  const auto contributions = extract_token_contributions(net, sequence({1, 2, 3, 4, 5}, 8));
  ASSERT_EQ(contributions.size(), 3u);
  for (const auto& c : contributions) {
    EXPECT_NEAR(c.weight, 1.0 / 3.0, 1e-12);
    EXPECT_LT(c.position, 5u);
  }
}

TEST(LstmContributions, NeverAttributesPadding) {
  for (std::uint64_t seed = 20; seed < 40; ++seed) {
    LstmNetwork net = tiny_net(seed);
    Rng rng(seed, "lengths");
    std::vector<TokenId> ids(1 + rng.below(8));
    for (auto& id : ids) id = static_cast<TokenId>(1 + rng.below(6));
    const auto seq = sequence(ids, 8);
    double total = 0.0;
    for (const auto& c : extract_token_contributions(net, seq)) {
      EXPECT_LT(c.position, seq.true_length);
      EXPECT_GE(c.weight, 0.0);
      total += c.weight;
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

EncodedSet toy_set(std::size_t n, std::uint64_t seed) {
  // Fake documents use tokens 1..3, real ones 4..6.
  Rng rng(seed, "toy");
  EncodedSet set;
  for (std::size_t i = 0; i < n; ++i) {
    const bool fake = i % 2 == 0;
    std::vector<TokenId> ids(2 + rng.below(6));
    for (auto& id : ids) id = static_cast<TokenId>((fake ? 1 : 4) + rng.below(3));
    set.sequences.push_back(sequence(ids, 8));
    set.labels.push_back(fake ? Label::Fake : Label::Real);
  }
  return set;
}

TEST(LstmTrain, MemorizesToySet) {
  const auto data = toy_set(20, 1);
  // Wide enough that no layer starts out entirely inactive.
  auto config = tiny_config();
  config.filters = config.hidden1 = config.hidden2 = config.dense1 = 16;
  config.dense2 = 8;
  LstmNetwork net(config, random_embedding(6, 4, 1), 1);
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 4;
  cfg.lr = 0.01;
  const auto result = train(net, data, data, cfg);
  EXPECT_EQ(result.history.train_accuracy.size(), result.history.valid_accuracy.size());
  EXPECT_EQ(*std::max_element(result.history.train_accuracy.begin(), result.history.train_accuracy.end()), 1.0);
}

TEST(LstmTrain, ZeroLearningRateLeavesWeightsAndHistoryFlat) {
  const auto data = toy_set(12, 2);
  LstmNetwork net(tiny_config(), random_embedding(6, 4, 2), 2);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 5;
  cfg.lr = 0.0;
  const auto result = train(net, data, data, cfg);
  const auto before = net.params().tensors();
  const auto after = result.network.params().tensors();
  for (std::size_t t = 0; t < before.size(); ++t) EXPECT_EQ(before[t].second, after[t].second);
  for (const double l : result.history.train_loss) EXPECT_DOUBLE_EQ(l, result.history.train_loss.front());
}

TEST(LstmTrain, IsDeterministicAndKeepsEmbeddingFrozen) {
  const auto data = toy_set(16, 3);
  auto config = tiny_config();
  config.dropout = 0.3;
  LstmNetwork net(config, random_embedding(6, 4, 3), 3);
  const auto before = net.embedding().content_hash();
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 4;
  cfg.lr = 0.01;
  const auto a = train(net, data, data, cfg);
  const auto b = train(net, data, data, cfg);
  EXPECT_EQ(a.history.train_loss, b.history.train_loss);
  EXPECT_EQ(a.network.embedding().content_hash(), before);
}

TEST(LstmArtifact, SerializationRoundTripsExactly) {
  LstmArtifact artifact;
  artifact.vocabulary = Vocabulary({"a", "b", "c", "d", "e", "f"});
  auto emb = random_embedding(6, 4, 4);
  emb = std::make_shared<const EmbeddingMatrix>(emb->rows(), artifact.vocabulary.hash());
  artifact.network = LstmNetwork(tiny_config(), emb, 4);
  artifact.training_meta = {{"seed", 4}};
  const auto bytes = artifact.serialize();
  const auto back = LstmArtifact::deserialize(bytes);
  EXPECT_EQ(back.serialize(), bytes);
  EXPECT_EQ(back.predict_proba_text("a b c"), artifact.predict_proba_text("a b c"));
  EXPECT_THROW(LstmArtifact::deserialize(bytes.substr(0, bytes.size() - 3)), InputError);
  EXPECT_THROW(LstmArtifact::deserialize("FNLSTM\0\0garbage"), InputError);
}

}  // namespace
}  // namespace fakenews
