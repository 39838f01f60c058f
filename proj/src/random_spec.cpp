#include "sksynth/random_spec.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <vector>

namespace sksynth {

std::string random_factored_text(std::uint64_t seed, const RandomSpecParams& params) {
  std::mt19937_64 rng(seed);
  // modulo keeps the stream identical across standard libraries
  auto pick = [&](std::size_t lo, std::size_t hi) { return lo + rng() % (hi - lo + 1); };
  auto coin = [&](unsigned percent) { return rng() % 100 < percent; };

  // Mostly coupled instances (factors keep meeting the same pair of
  // existential variables, which is what makes the initial abstraction
  // incomplete); occasionally a loose one, including degenerate sizes.
  const bool loose = coin(10);
  const std::size_t n = loose ? pick(1, params.max_x) : pick(2, params.max_x);
  const std::size_t m = loose ? pick(0, params.max_y) : pick(1, params.max_y);
  const std::size_t r = loose ? pick(0, params.max_factors) : pick(2, params.max_factors);

  std::vector<std::string> names;
  std::ostringstream out;
  for (std::size_t i = 1; i <= n; ++i) {
    out << "var x" << i << " : x;\n";
    names.push_back("x" + std::to_string(i));
  }
  for (std::size_t j = 1; j <= m; ++j) {
    out << "var y" << j << " : y;\n";
    names.push_back("y" + std::to_string(j));
  }

  const std::size_t hot1 = pick(0, n - 1);
  const std::size_t hot2 = n >= 2 ? (hot1 + 1 + pick(0, n - 2)) % n : hot1;

  for (std::size_t f = 0; f < r; ++f) {
    const std::size_t width =
        pick(loose ? 1 : 2, std::min(params.max_width, names.size()));
    std::vector<std::size_t> chosen;
    auto add = [&](std::size_t v) {
      if (chosen.size() < width && std::find(chosen.begin(), chosen.end(), v) == chosen.end())
        chosen.push_back(v);
    };
    if (!loose && coin(65)) add(hot1);
    if (!loose && coin(65)) add(hot2);
    while (chosen.size() < width) add(pick(0, names.size() - 1));

    std::vector<std::string> terms;
    for (std::size_t v : chosen) terms.push_back((coin(40) ? "!" : "") + names[v]);

    if (coin(40)) {
      // plain clause
      out << terms[0];
      for (std::size_t i = 1; i < terms.size(); ++i) out << " | " << terms[i];
    } else {
      // random operator tree folded left-to-right
      std::string expr = terms[0];
      for (std::size_t i = 1; i < terms.size(); ++i) {
        const char* op = "&";
        const std::size_t roll = pick(0, 7);
        if (roll < 3)
          op = "&";
        else if (roll < 6)
          op = "|";
        else
          op = "^";
        expr = "(" + expr + " " + op + " " + terms[i] + ")";
        if (coin(20)) expr = "!" + expr;
      }
      out << expr;
    }
    out << ";\n";
  }
  return out.str();
}

}  // namespace sksynth
