// Minimal library use: CBCE(AN) over a Sleeping CB black box on the
// shifting-expert scenario, printing the cumulative loss per segment.

#include <cbce/experiment.hpp>

#include <iostream>

int main() {
  using namespace cbce;
  auto sc = LEAScenario::standard(7);
  sc.n_experts = 50;
  sc.segments = even_segments(sc.horizon, sc.n_experts);

  CBCEConfig cfg;  // DS schedule with g = 2, AN potential, warm start
  auto meta = make_cbce<CbLea>(cfg, cb_lea_factory(sc.n_experts, AN{}, 1e-6));

  double segment_loss = 0.0;
  for (Time t = 1; t <= sc.horizon; ++t) {
    meta.predict(t);
    segment_loss += meta.observe(t, LinearLoss{gen_lea_losses(sc, t)}).meta_loss;
    if (t % 300 == 0) {
      std::cout << "steps " << t - 299 << ".." << t << ": loss " << segment_loss << '\n';
      segment_loss = 0.0;
    }
  }
}
