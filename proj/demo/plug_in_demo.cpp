// Simulates one heteroscedastic dataset, fits the plug-in error density and
// compares it with the density fitted on the (normally unobservable) errors.
//
//   plug_in_demo [n] [seed]

#include <cstdio>
#include <cstdlib>

#include "epdens/epdens.hpp"

int main(int argc, char** argv)
{
  epdens::ModelConfig config;
  config.n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 200;
  config.seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 7;

  const epdens::Model model(config);
  const auto data = model.generate(config.seed);
  const auto plug = epdens::estimate_error_density(data.observations, data.support);
  const auto oracle = epdens::pinsker_oracle(data.errors, data.support.kind);

  const auto& seq = plug.sequences;
  std::printf("n = %zu  b_n = %.4f  n_1 = %zu  n_2 = %zu  S = %zu\n", seq.n, seq.b_n, seq.n_1,
              seq.n_2, seq.S);
  std::printf("rescaled residuals outside [0, 1]: %zu\n\n", plug.outside_unit_interval);

  std::printf("%6s %10s %10s %10s\n", "u", "true", "plug-in", "oracle");
  for (int i = 0; i <= 20; ++i) {
    const double u = i / 20.0;
    std::printf("%6.2f %10.4f %10.4f %10.4f\n", u, model.true_density(u),
                epdens::evaluate(plug.estimate, u), epdens::evaluate(oracle, u));
  }

  const auto grid = model.ise_grid(data.errors);
  const auto truth = model.truth();
  std::printf("\nISE plug-in %.5f   ISE oracle %.5f\n", epdens::ise(plug.estimate, truth, grid),
              epdens::ise(oracle, truth, grid));
  return 0;
}
