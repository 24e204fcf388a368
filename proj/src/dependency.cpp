#include "depdisc/dependency.hpp"

#include <algorithm>
#include <sstream>

#include "depdisc/error.hpp"

namespace depdisc {

DepKind dep_kind_from_string(const std::string& s) {
  if (s == "fd") return DepKind::fd;
  if (s == "ucc") return DepKind::ucc;
  if (s == "od") return DepKind::od;
  if (s == "dc") return DepKind::dc;
  throw InputError("unknown dependency kind: " + s);
}

const char* dep_kind_name(DepKind kind) {
  switch (kind) {
    case DepKind::fd: return "fd";
    case DepKind::ucc: return "ucc";
    case DepKind::od: return "od";
    case DepKind::dc: return "dc";
  }
  return "?";
}

Dependency Dependency::make_fd(AttributeSet lhs, uint32_t rhs) {
  Dependency d;
  d.kind = DepKind::fd;
  d.lhs = lhs;
  d.rhs = rhs;
  return d;
}

Dependency Dependency::make_ucc(AttributeSet columns) {
  Dependency d;
  d.kind = DepKind::ucc;
  d.columns = columns;
  return d;
}

Dependency Dependency::make_od(AttributeSet lhs, uint32_t rhs, OdDirection direction) {
  Dependency d;
  d.kind = DepKind::od;
  d.lhs = lhs;
  d.rhs = rhs;
  d.direction = direction;
  return d;
}

Dependency Dependency::make_dc(std::vector<Predicate> predicates) {
  Dependency d;
  d.kind = DepKind::dc;
  std::sort(predicates.begin(), predicates.end());
  d.predicates = std::move(predicates);
  return d;
}

namespace {

std::string name_list(AttributeSet set, const std::vector<std::string>& names) {
  std::string out;
  bool first = true;
  set.for_each([&](uint32_t i) {
    if (!first) out += ",";
    out += names.at(i);
    first = false;
  });
  return out;
}

}  // namespace

std::string Dependency::render(const std::vector<std::string>& names) const {
  switch (kind) {
    case DepKind::fd: {
      std::string lhs_text = lhs.empty() ? "TRUE" : name_list(lhs, names);
      return lhs_text + " -> " + names.at(rhs);
    }
    case DepKind::ucc:
      return "UNIQUE(" + name_list(columns, names) + ")";
    case DepKind::od:
      return name_list(lhs, names) + " ~> " + names.at(rhs) +
             (direction == OdDirection::asc ? " [asc]" : " [desc]");
    case DepKind::dc: {
      std::string out = "!( ";
      for (size_t i = 0; i < predicates.size(); ++i) {
        if (i) out += " & ";
        const Predicate& p = predicates[i];
        out += "t0." + names.at(p.attribute) + " " + pred_op_symbol(p.op) + " t1." +
               names.at(p.attribute);
      }
      out += " )";
      return out;
    }
  }
  throw ContractError("unknown dependency kind");
}

namespace {

uint32_t index_of(const std::vector<std::string>& names, const std::string& name) {
  for (uint32_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  throw InputError("unknown attribute in dependency text: " + name);
}

std::vector<std::string> split(const std::string& text, const std::string& sep) {
  std::vector<std::string> parts;
  size_t pos = 0;
  while (true) {
    size_t next = text.find(sep, pos);
    if (next == std::string::npos) {
      parts.push_back(text.substr(pos));
      return parts;
    }
    parts.push_back(text.substr(pos, next - pos));
    pos = next + sep.size();
  }
}

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

AttributeSet parse_name_list(const std::string& text,
                             const std::vector<std::string>& names) {
  AttributeSet set;
  for (const std::string& part : split(text, ",")) set.set(index_of(names, strip(part)));
  return set;
}

PredOp parse_op(const std::string& symbol) {
  for (PredOp op : {PredOp::eq, PredOp::ne, PredOp::lt, PredOp::le, PredOp::gt,
                    PredOp::ge}) {
    if (symbol == pred_op_symbol(op)) return op;
  }
  throw InputError("unknown operator: " + symbol);
}

}  // namespace

Dependency parse_dependency(const std::string& text,
                            const std::vector<std::string>& names) {
  if (text.starts_with("UNIQUE(") && text.ends_with(")")) {
    return Dependency::make_ucc(
        parse_name_list(text.substr(7, text.size() - 8), names));
  }
  if (text.starts_with("!(")) {
    std::string body = strip(text.substr(2, text.rfind(')') - 2));
    std::vector<Predicate> predicates;
    for (const std::string& clause : split(body, "&")) {
      std::istringstream in(strip(clause));
      std::string left, op, right;
      in >> left >> op >> right;
      if (!left.starts_with("t0.") || !right.starts_with("t1."))
        throw InputError("malformed predicate: " + clause);
      uint32_t attr = index_of(names, left.substr(3));
      if (right.substr(3) != left.substr(3))
        throw InputError("predicate attributes differ: " + clause);
      predicates.push_back({attr, parse_op(op)});
    }
    return Dependency::make_dc(std::move(predicates));
  }
  if (size_t arrow = text.find(" ~> "); arrow != std::string::npos) {
    std::string rhs_part = text.substr(arrow + 4);
    OdDirection direction = OdDirection::asc;
    if (size_t bracket = rhs_part.find(" ["); bracket != std::string::npos) {
      std::string dir = rhs_part.substr(bracket + 2, rhs_part.rfind(']') - bracket - 2);
      direction = (dir == "desc") ? OdDirection::desc : OdDirection::asc;
      rhs_part = rhs_part.substr(0, bracket);
    }
    return Dependency::make_od(parse_name_list(text.substr(0, arrow), names),
                               index_of(names, strip(rhs_part)), direction);
  }
  if (size_t arrow = text.find(" -> "); arrow != std::string::npos) {
    std::string lhs_part = strip(text.substr(0, arrow));
    AttributeSet lhs;
    if (lhs_part != "TRUE") lhs = parse_name_list(lhs_part, names);
    return Dependency::make_fd(lhs, index_of(names, strip(text.substr(arrow + 4))));
  }
  throw InputError("unparsable dependency: " + text);
}

void sort_canonical(std::vector<Dependency>& deps,
                    const std::vector<std::string>& names) {
  std::vector<std::pair<std::string, Dependency>> keyed;
  keyed.reserve(deps.size());
  for (auto& d : deps) keyed.emplace_back(d.render(names), std::move(d));
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  deps.clear();
  for (auto& [text, d] : keyed) deps.push_back(std::move(d));
}

}  // namespace depdisc
