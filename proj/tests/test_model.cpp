#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "nehd/model.hpp"
#include "nehd/rng.hpp"
#include "test_util.hpp"

using nehd::Model;
using nehd::ModelConfig;
using nehd::Tensor;
using nehd::VariantKind;
using testutil::random_tensor;

namespace {

ModelConfig config_of(VariantKind kind, std::size_t rows = 192, std::size_t cols = 12) {
    ModelConfig cfg;
    cfg.kind = kind;
    cfg.freq_bins = rows;
    cfg.frames = cols;
    return cfg;
}

}  // namespace

TEST_CASE("the linear baseline on a 192x12 plane owns exactly 9220 parameters") {
    const Model m = nehd::build_model(config_of(VariantKind::kLinearBaseline), 0);
    CHECK(nehd::total_parameters(m) == 9220);  // (2304 + 1) * 4
}

TEST_CASE("per-layer counts sum to the totals across all variants") {
    for (VariantKind kind : {VariantKind::kLinearBaseline, VariantKind::kEdgeOnly,
                             VariantKind::kHistogramOnly, VariantKind::kNehd}) {
        const Model m = nehd::build_model(config_of(kind), 1);
        std::size_t sum = 0;
        for (const auto& pc : nehd::count_parameters(m)) sum += pc.count;
        CHECK(sum == nehd::total_parameters(m));
    }
}

TEST_CASE("hand-derived totals hold for every default variant") {
    // edge block: 8*9 weights + 8 + 1 gate; histogram: mix + centers + widths;
    // classifier: 4 * features + 4
    CHECK(nehd::total_parameters(nehd::build_model(config_of(VariantKind::kEdgeOnly), 0)) ==
          8 * 9 + 9 + (4 * (9 * 48 * 6) + 4));
    CHECK(nehd::total_parameters(nehd::build_model(config_of(VariantKind::kHistogramOnly), 0)) ==
          (8 * 1 + 8 + 8) + (4 * (8 * 48 * 6) + 4));
    CHECK(nehd::total_parameters(nehd::build_model(config_of(VariantKind::kNehd), 0)) ==
          8 * 9 + 9 + (8 * 9 + 8 + 8) + (4 * (8 * 48 * 6) + 4));
}

TEST_CASE("a documented tiny configuration counts to 4681") {
    ModelConfig cfg = config_of(VariantKind::kNehd);
    cfg.edge_filters = 4;
    cfg.bins = 4;
    const Model m = nehd::build_model(cfg, 0);
    // 4*9 + 5 edge, 4*5 + 4 + 4 histogram, 4*(4*48*6) + 4 classifier
    CHECK(nehd::total_parameters(m) == 4681);
}

TEST_CASE("the default parameter budget stays near the published scale") {
    const std::size_t total = nehd::total_parameters(nehd::build_model(config_of(VariantKind::kNehd), 0));
    CHECK(total >= 5000);
    CHECK(total <= 30000);
}

TEST_CASE("building twice with one seed reproduces every tensor") {
    for (VariantKind kind : {VariantKind::kLinearBaseline, VariantKind::kNehd}) {
        Model a = nehd::build_model(config_of(kind), 42);
        Model b = nehd::build_model(config_of(kind), 42);
        auto pa = a.parameters();
        auto pb = b.parameters();
        REQUIRE(pa.size() == pb.size());
        for (std::size_t i = 0; i < pa.size(); ++i) {
            CHECK(pa[i].name == pb[i].name);
            CHECK(testutil::max_abs_diff(*pa[i].tensor, *pb[i].tensor) == 0.0);
        }
    }
}

TEST_CASE("a zero plane through a zeroed linear classifier gives zero logits") {
    Model m = nehd::build_model(config_of(VariantKind::kLinearBaseline), 3);
    m.classifier_w.fill(0.0);
    const nehd::SampleCache cache = nehd::forward_one(m, Tensor({192, 12}, 0.0));
    for (std::size_t c = 0; c < 4; ++c) CHECK(cache.logits[c] == 0.0);
}

TEST_CASE("a sample alone equals the same sample inside a batch") {
    auto rng = nehd::make_rng(600);
    const Model m = nehd::build_model(config_of(VariantKind::kNehd, 16, 8), 5);
    std::vector<Tensor> batch;
    for (int i = 0; i < 6; ++i) batch.push_back(random_tensor({16, 8}, rng));
    const Tensor logits = nehd::forward(m, batch);
    REQUIRE(logits.dim(0) == 6);
    for (std::size_t i = 0; i < 6; ++i) {
        const nehd::SampleCache one = nehd::forward_one(m, batch[i]);
        for (std::size_t c = 0; c < 4; ++c) {
            CHECK(std::abs(logits(i, c) - one.logits[c]) < 1e-12);
        }
    }
}

TEST_CASE("permuting a batch permutes the logits rows") {
    auto rng = nehd::make_rng(601);
    const Model m = nehd::build_model(config_of(VariantKind::kHistogramOnly, 16, 8), 5);
    std::vector<Tensor> batch;
    for (int i = 0; i < 4; ++i) batch.push_back(random_tensor({16, 8}, rng));
    std::vector<Tensor> reversed(batch.rbegin(), batch.rend());
    const Tensor a = nehd::forward(m, batch);
    const Tensor b = nehd::forward(m, reversed);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t c = 0; c < 4; ++c) CHECK(a(i, c) == b(3 - i, c));
    }
}

TEST_CASE("an empty batch is rejected") {
    const Model m = nehd::build_model(config_of(VariantKind::kLinearBaseline, 8, 4), 0);
    CHECK_THROWS(nehd::forward(m, {}));
}

TEST_CASE("non-finite input names the offending stage") {
    const Model m = nehd::build_model(config_of(VariantKind::kNehd, 16, 8), 0);
    Tensor plane({16, 8}, 0.0);
    plane(3, 3) = std::nan("");
    try {
        nehd::forward_one(m, plane);
        FAIL("expected a diagnostic error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("input") != std::string::npos);
    }
}

TEST_CASE("wrong plane shape is rejected") {
    const Model m = nehd::build_model(config_of(VariantKind::kNehd, 16, 8), 0);
    CHECK_THROWS(nehd::forward_one(m, Tensor({8, 16}, 0.0)));
}

TEST_CASE("the pooling window must fit the plane") {
    ModelConfig cfg = config_of(VariantKind::kNehd, 3, 12);
    CHECK_THROWS(nehd::build_model(cfg, 0));  // 4-row pooling cannot fit 3 rows
}

TEST_CASE("variant names round-trip and accept the short aliases") {
    for (VariantKind kind : {VariantKind::kLinearBaseline, VariantKind::kEdgeOnly,
                             VariantKind::kHistogramOnly, VariantKind::kNehd}) {
        CHECK(nehd::variant_from_name(nehd::variant_name(kind)) == kind);
    }
    CHECK(nehd::variant_from_name("linear") == VariantKind::kLinearBaseline);
    CHECK(nehd::variant_from_name("edge") == VariantKind::kEdgeOnly);
    CHECK(nehd::variant_from_name("histogram") == VariantKind::kHistogramOnly);
    CHECK_THROWS(nehd::variant_from_name("resnet"));
}

TEST_CASE("end-to-end gradients match finite differences on a tiny plane") {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        auto rng = nehd::make_rng(700 + seed);
        ModelConfig cfg = config_of(VariantKind::kNehd, 8, 4);
        cfg.edge_filters = 4;
        cfg.bins = 3;
        cfg.pool_rows = 2;
        cfg.pool_cols = 2;
        Model m = nehd::build_model(cfg, seed);
        Tensor plane = random_tensor({8, 4}, rng);
        std::vector<double> proj(4);
        for (auto& v : proj) v = nehd::uniform(rng, -1.0, 1.0);

        const nehd::SampleCache cache = nehd::forward_one(m, plane);
        nehd::ModelGrads grads = nehd::zero_grads(m);
        nehd::backward_one(m, plane, cache, proj.data(), grads);

        auto loss = [&] {
            const nehd::SampleCache c = nehd::forward_one(m, plane);
            double s = 0.0;
            for (std::size_t k = 0; k < 4; ++k) s += c.logits[k] * proj[k];
            return s;
        };
        const auto params = m.parameters();
        const auto grad_ptrs = grads.aligned(m);
        REQUIRE(params.size() == grad_ptrs.size());
        for (std::size_t i = 0; i < params.size(); ++i) {
            worst = std::max(worst, testutil::fd_check(*params[i].tensor, *grad_ptrs[i], loss));
        }
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("exported features stack the plane with upsampled histogram maps") {
    auto rng = nehd::make_rng(800);
    const Model m = nehd::build_model(config_of(VariantKind::kNehd, 16, 8), 2);
    const Tensor plane = random_tensor({16, 8}, rng);
    const Tensor stacked = nehd::export_features(m, plane);
    REQUIRE(stacked.rank() == 3);
    CHECK(stacked.dim(0) == 1 + 8);
    CHECK(stacked.dim(1) == 16);
    CHECK(stacked.dim(2) == 8);
    for (std::size_t r = 0; r < 16; ++r) {
        for (std::size_t c = 0; c < 8; ++c) CHECK(stacked(0, r, c) == plane(r, c));
    }
    for (std::size_t ch = 1; ch < 9; ++ch) {
        for (std::size_t r = 0; r < 16; ++r) {
            for (std::size_t c = 0; c < 8; ++c) {
                CHECK(stacked(ch, r, c) > 0.0);
                CHECK(stacked(ch, r, c) <= 1.0);
            }
        }
    }

    const Model linear = nehd::build_model(config_of(VariantKind::kLinearBaseline, 16, 8), 2);
    CHECK_THROWS(nehd::export_features(linear, plane));
}

TEST_CASE("nearest upsampling repeats each pooled cell") {
    auto rng = nehd::make_rng(801);
    const Model m = nehd::build_model(config_of(VariantKind::kNehd, 16, 8), 2);
    const Tensor plane = random_tensor({16, 8}, rng);
    const Tensor stacked = nehd::export_features(m, plane);
    const nehd::SampleCache cache = nehd::forward_one(m, plane);
    // pool 4x2 over 16x8 -> pooled 4x4; cell (r/4, c/2) backs pixel (r, c)
    for (std::size_t b = 0; b < 8; ++b) {
        for (std::size_t r = 0; r < 16; ++r) {
            for (std::size_t c = 0; c < 8; ++c) {
                CHECK(stacked(b + 1, r, c) == cache.hist.pooled(b, r / 4, c / 2));
            }
        }
    }
}
