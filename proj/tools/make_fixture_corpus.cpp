// Writes the synthetic corpora used by the tests, for trying the CLI by hand.
#include <CLI11.hpp>

#include <iostream>

#include "fixtures.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write a synthetic oodgate corpus"};
  std::string out;
  std::uint64_t seed = 7;
  bool gate_accuracy = false;
  std::string backbones;
  app.add_option("out", out, "Destination directory")->required();
  app.add_option("--seed", seed, "RNG seed for the end-to-end corpus");
  app.add_flag("--gate-accuracy", gate_accuracy, "Write the 436-image gate accuracy corpus instead");
  app.add_option("--backbones", backbones, "Backbone CSV to copy into the corpus");
  CLI11_PARSE(app, argc, argv);

  namespace t = oodgate::testing;
  try {
    if (gate_accuracy) {
      const auto c = t::write_gate_accuracy_corpus(out);
      std::cout << c.gallery.string() << '\n' << c.manifest.string() << '\n';
    } else {
      const auto c = t::write_fixture_corpus(out, seed, backbones);
      std::cout << c.gallery.string() << '\n'
                << c.manifest.string() << '\n'
                << c.ground_truth.string() << '\n';
      if (!c.backbone_table.empty()) std::cout << c.backbone_table.string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
