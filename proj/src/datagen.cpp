#include "depdisc/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "depdisc/rng.hpp"

namespace depdisc {
namespace datagen {

namespace {

double unit_draw(Rng& rng) { return double(rng.next() >> 11) * 0x1.0p-53; }

// Weighted value draw, weight 1/(v+1)^skew. Skew 0 degenerates to uniform.
struct ValueDrawer {
  explicit ValueDrawer(const ColumnSpec& spec) : spec_(spec) {
    if (spec.skew > 0.0) {
      cumulative_.reserve(spec.cardinality);
      double total = 0.0;
      for (uint32_t v = 0; v < spec.cardinality; ++v) {
        total += 1.0 / std::pow(double(v) + 1.0, spec.skew);
        cumulative_.push_back(total);
      }
    }
  }

  uint32_t draw(Rng& rng) const {
    if (spec_.cardinality <= 1) return 0;
    if (cumulative_.empty()) return uint32_t(rng.next_below(spec_.cardinality));
    double x = unit_draw(rng) * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
    if (it == cumulative_.end()) --it;
    return uint32_t(it - cumulative_.begin());
  }

  const ColumnSpec& spec_;
  std::vector<double> cumulative_;
};

std::string cell_text(const ColumnSpec& spec, uint32_t value) {
  if (spec.numeric) return std::to_string(value);
  return "v" + std::to_string(value);
}

std::vector<std::string> column_names(const std::vector<ColumnSpec>& specs) {
  std::vector<std::string> names;
  names.reserve(specs.size());
  for (const auto& s : specs) names.push_back(s.name);
  return names;
}

std::string letter_name(uint32_t i) {
  std::string name(1, char('A' + i % 26));
  if (i >= 26) name += std::to_string(i / 26);
  return name;
}

}  // namespace

Relation random_relation(uint32_t rows, const std::vector<ColumnSpec>& specs,
                         uint64_t seed) {
  Rng rng(seed);
  std::vector<ValueDrawer> drawers;
  drawers.reserve(specs.size());
  for (const auto& s : specs) drawers.emplace_back(s);

  std::vector<std::vector<std::string>> cells(rows);
  for (uint32_t i = 0; i < rows; ++i) {
    auto& row = cells[i];
    row.reserve(specs.size());
    for (size_t a = 0; a < specs.size(); ++a) {
      if (specs[a].null_rate > 0.0 && unit_draw(rng) < specs[a].null_rate) {
        row.emplace_back();
      } else {
        row.push_back(cell_text(specs[a], drawers[a].draw(rng)));
      }
    }
  }
  return relation_from_rows(column_names(specs), cells, {});
}

Relation corpus_relation(uint32_t index) {
  Rng rng(1000 + index);
  uint32_t n = index < 4 ? index : uint32_t(4 + rng.next_below(147));
  uint32_t m = uint32_t(1 + rng.next_below(6));

  static const double kSkews[] = {0.0, 0.0, 0.8, 1.6};
  static const double kNullRates[] = {0.0, 0.0, 0.0, 0.12};
  std::vector<ColumnSpec> specs;
  for (uint32_t a = 0; a < m; ++a) {
    ColumnSpec spec;
    spec.name = letter_name(a);
    spec.cardinality = uint32_t(1 + rng.next_below(std::min<uint32_t>(std::max<uint32_t>(n, 1), 60)));
    spec.skew = kSkews[rng.next_below(4)];
    spec.numeric = (rng.next() & 1) != 0;
    spec.null_rate = kNullRates[rng.next_below(4)];
    specs.push_back(spec);
  }
  return random_relation(n, specs, 7700 + index);
}

Relation od_corpus_relation(uint32_t index) {
  Rng rng(2000 + index);
  uint32_t n = index < 3 ? index : uint32_t(3 + rng.next_below(78));
  uint32_t m = uint32_t(2 + rng.next_below(4));
  bool plant = index % 3 == 0;

  std::vector<std::vector<std::string>> cells(n);
  std::vector<std::string> names;
  std::vector<uint32_t> cards;
  for (uint32_t a = 0; a < m; ++a) {
    names.push_back(letter_name(a));
    cards.push_back(uint32_t(2 + rng.next_below(12)));
  }
  // Planted entries carry up to three quantised ramps over the row counter
  // (two ascending at different granularities, one descending); any further
  // columns are noise. The ramps order-determine each other both ways.
  uint32_t ramps = plant ? std::min<uint32_t>(m, 3) : 0;
  for (uint32_t i = 0; i < n; ++i) {
    auto& row = cells[i];
    for (uint32_t a = 0; a < m; ++a) {
      uint32_t v;
      if (a < ramps) {
        v = uint32_t((uint64_t(i) * cards[a]) / std::max<uint32_t>(n, 1));
        if (a == 2) v = cards[a] - 1 - v;
      } else {
        v = uint32_t(rng.next_below(cards[a]));
      }
      row.push_back(std::to_string(v));
    }
  }
  return relation_from_rows(names, cells, {});
}

Relation dc_corpus_relation(uint32_t index) {
  Rng rng(3000 + index);
  uint32_t n = index < 3 ? index : uint32_t(3 + rng.next_below(38));
  uint32_t m = uint32_t(1 + rng.next_below(3));
  bool plant = index % 3 == 0 && m >= 2;

  if (!plant) {
    std::vector<ColumnSpec> specs;
    for (uint32_t a = 0; a < m; ++a) {
      ColumnSpec spec;
      spec.name = letter_name(a);
      spec.cardinality = uint32_t(2 + rng.next_below(7));
      spec.numeric = rng.next_below(4) != 0;
      specs.push_back(spec);
    }
    return random_relation(n, specs, 8800 + index);
  }

  // Opposed ramps with duplicates: no row pair rises in both A and B, so
  // constraints like "no pair with t0.A < t1.A and t0.B < t1.B" hold.
  std::vector<std::string> names;
  for (uint32_t a = 0; a < m; ++a) names.push_back(letter_name(a));
  uint32_t ca = uint32_t(2 + rng.next_below(5));
  uint32_t cb = uint32_t(2 + rng.next_below(5));
  std::vector<std::vector<std::string>> cells(n);
  for (uint32_t i = 0; i < n; ++i) {
    auto& row = cells[i];
    row.push_back(std::to_string((uint64_t(i) * ca) / std::max<uint32_t>(n, 1)));
    row.push_back(std::to_string(cb - 1 - uint32_t((uint64_t(i) * cb) / std::max<uint32_t>(n, 1))));
    if (m == 3) row.push_back("w" + std::to_string(rng.next_below(4)));
  }
  return relation_from_rows(names, cells, {});
}

Relation deep_lattice_relation() {
  static const uint32_t kCards[] = {2, 3, 4, 6, 10, 16, 28, 50};
  std::vector<ColumnSpec> specs;
  for (uint32_t a = 0; a < 8; ++a) {
    ColumnSpec spec;
    spec.name = letter_name(a);
    spec.cardinality = kCards[a];
    specs.push_back(spec);
  }
  return random_relation(5000, specs, 41);
}

Relation wide_blocks_relation() {
  std::vector<ColumnSpec> specs;
  for (uint32_t a = 0; a < 20; ++a) {
    ColumnSpec spec;
    spec.name = letter_name(a);
    spec.cardinality = 2 + a % 7;
    specs.push_back(spec);
  }
  return random_relation(500, specs, 42);
}

Relation order_lines_relation(uint32_t rows) {
  if (rows < 16) throw std::invalid_argument("order_lines_relation: too few rows");
  Rng rng(4242);
  const uint32_t n = rows;

  // Residue columns: pairwise products exceed the row count, so any two of
  // them pin down the row counter and form a key.
  static const uint32_t kPrimes[] = {2503, 2521, 2531, 2539, 2543, 2549};
  if (uint64_t(kPrimes[0]) * kPrimes[1] < n) {
    throw std::invalid_argument("order_lines_relation: row count too large");
  }

  std::vector<uint32_t> item(n), qty(n);
  for (uint32_t i = 0; i < n; ++i) {
    item[i] = uint32_t(rng.next_below(40));
    qty[i] = uint32_t(1 + rng.next_below(28));
  }

  auto key0 = rng.permutation(n);
  auto key1 = rng.permutation(n);
  // Single planted collision per key column. The paired value column copies
  // the key's image except at the second row, so exactly one row pair
  // violates KEY -> VAL.
  const uint32_t r1 = 1234, r2 = 8765, r3 = 4321, r4 = 9876;
  key0[r2] = key0[r1];
  key1[r4] = key1[r3];

  auto hash_val = [](uint32_t key, uint32_t mul, uint32_t card) {
    return uint32_t((uint64_t(key) * mul + 17) % card);
  };

  std::vector<std::string> names = {"OKEY", "LINE", "ITEM", "CODE", "GRP",
                                    "VAL0", "VAL1", "R1",   "R2",   "R3",
                                    "R4",   "R5",   "R6",   "KEY0", "KEY1",
                                    "QTY"};
  std::vector<std::vector<std::string>> cells(n);
  for (uint32_t i = 0; i < n; ++i) {
    uint32_t val0 = hash_val(key0[i], 2654435761u, 2400);
    uint32_t val1 = hash_val(key1[i], 2246822519u, 2000);
    if (i == r2) val0 = (val0 + 1) % 2400;
    if (i == r4) val1 = (val1 + 1) % 2000;
    auto& row = cells[i];
    row.reserve(16);
    row.push_back(std::to_string(i / 4));
    row.push_back(std::to_string(i % 4));
    row.push_back(std::to_string(item[i]));
    row.push_back(std::to_string((item[i] * 23 + 5) % 40));
    row.push_back(std::to_string(item[i] % 10));
    row.push_back(std::to_string(val0));
    row.push_back(std::to_string(val1));
    for (uint32_t p = 0; p < 6; ++p) row.push_back(std::to_string(i % kPrimes[p]));
    row.push_back(std::to_string(key0[i]));
    row.push_back(std::to_string(key1[i]));
    row.push_back(std::to_string(qty[i]));
  }
  return relation_from_rows(names, cells, {});
}

void write_csv(const Relation& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);

  auto emit = [&out](const std::string& cell) {
    if (cell.find_first_of(",\"\n\r") == std::string::npos) {
      out << cell;
      return;
    }
    out << '"';
    for (char c : cell) {
      if (c == '"') out << '"';
      out << c;
    }
    out << '"';
  };

  for (uint32_t a = 0; a < r.column_count(); ++a) {
    if (a) out << ',';
    emit(r.attribute_name(a));
  }
  out << '\n';
  for (uint32_t i = 0; i < r.row_count(); ++i) {
    for (uint32_t a = 0; a < r.column_count(); ++a) {
      if (a) out << ',';
      emit(r.column(a).decode(r.code(i, a)));
    }
    out << '\n';
  }
}

}  // namespace datagen
}  // namespace depdisc
