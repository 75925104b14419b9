// Writes a random supermartingale scenario: process f = N - g, plus its pieces N and g.
// Usage: gen_fixture SEED OUT.json [--product]

#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "doobkit/error.hpp"
#include "doobkit/generators.hpp"
#include "doobkit/scenario.hpp"

int main(int argc, char** argv) {
  using namespace doobkit;
  if (argc < 3) {
    std::cerr << "usage: gen_fixture SEED OUT.json [--product]\n";
    return 3;
  }
  try {
    std::mt19937_64 rng(std::stoull(argv[1]));
    const bool product = argc > 3 && std::string(argv[3]) == "--product";
    FilteredSpace space = gen::random_space(rng);
    std::uniform_int_distribution<std::size_t> k(1, 3);
    MeasureFamily family = product ? gen::product_family(space, rng, 3) : gen::random_family(rng, space.n_atoms(), k(rng));
    gen::SupermartingaleSample s = gen::random_supermartingale(space, family, rng);

    Scenario sc{space, {}, family, {}, {}};
    for (std::size_t i = 0; i < family.size(); ++i) sc.measure_names.push_back("P" + std::to_string(i + 1));
    sc.processes.emplace_back("f", s.f);
    sc.processes.emplace_back("N", s.martingale);
    sc.processes.emplace_back("g", s.compensator);
    Json doc = to_json(sc);
    std::ofstream out(argv[2]);
    if (!out) throw Error(ErrorCode::Io, std::string("cannot write ") + argv[2]);
    out << doc.dump(2) << "\n";
  } catch (const std::exception& e) {
    std::cerr << "gen_fixture: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
