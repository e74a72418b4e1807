#include "xlr/descriptor/diff.hpp"

#include <algorithm>

#include "xlr/error.hpp"
#include "xlr/text.hpp"

namespace xlr::descriptor {

namespace {

enum class OpKind { kEqual, kDelete, kInsert };

struct Op {
  OpKind kind;
  std::size_t buggy_index;  // position in buggy lines (for insert: insertion point)
  std::size_t fixed_index;  // position in fixed lines (for delete: insertion point)
};

// Myers' greedy O((N+M)D) shortest edit script with a saved V array per step.
std::vector<Op> shortest_edit_script(const std::vector<std::string>& a,
                                     const std::vector<std::string>& b) {
  const auto n = static_cast<std::ptrdiff_t>(a.size());
  const auto m = static_cast<std::ptrdiff_t>(b.size());
  const std::ptrdiff_t max = n + m;
  const std::ptrdiff_t offset = max + 1;
  std::vector<std::ptrdiff_t> v(static_cast<std::size_t>(2 * max + 3), 0);
  std::vector<std::vector<std::ptrdiff_t>> trace;

  std::ptrdiff_t final_d = -1;
  for (std::ptrdiff_t d = 0; d <= max && final_d < 0; ++d) {
    trace.push_back(v);
    for (std::ptrdiff_t k = -d; k <= d; k += 2) {
      std::ptrdiff_t x;
      if (k == -d || (k != d && v[offset + k - 1] < v[offset + k + 1])) {
        x = v[offset + k + 1];
      } else {
        x = v[offset + k - 1] + 1;
      }
      std::ptrdiff_t y = x - k;
      while (x < n && y < m && a[x] == b[y]) {
        ++x;
        ++y;
      }
      v[offset + k] = x;
      if (x >= n && y >= m) {
        final_d = d;
        break;
      }
    }
  }

  std::vector<Op> ops;
  std::ptrdiff_t x = n;
  std::ptrdiff_t y = m;
  for (std::ptrdiff_t d = final_d; d >= 0; --d) {
    const auto& vd = trace[static_cast<std::size_t>(d)];
    const std::ptrdiff_t k = x - y;
    std::ptrdiff_t prev_k;
    if (k == -d || (k != d && vd[offset + k - 1] < vd[offset + k + 1])) {
      prev_k = k + 1;
    } else {
      prev_k = k - 1;
    }
    const std::ptrdiff_t prev_x = d == 0 ? 0 : vd[offset + prev_k];
    const std::ptrdiff_t prev_y = d == 0 ? 0 : prev_x - prev_k;
    while (x > prev_x && y > prev_y) {
      --x;
      --y;
      ops.push_back({OpKind::kEqual, static_cast<std::size_t>(x), static_cast<std::size_t>(y)});
    }
    if (d > 0) {
      if (x == prev_x) {
        ops.push_back({OpKind::kInsert, static_cast<std::size_t>(x), static_cast<std::size_t>(prev_y)});
      } else {
        ops.push_back({OpKind::kDelete, static_cast<std::size_t>(prev_x), static_cast<std::size_t>(y)});
      }
    }
    x = prev_x;
    y = prev_y;
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

}  // namespace

PatchDiff compute_diff(std::string_view buggy, std::string_view fixed,
                       std::size_t context_radius) {
  if (buggy.empty() || fixed.empty()) {
    throw PreconditionError("compute_diff: both texts must be non-empty");
  }
  if (buggy == fixed) throw PreconditionError("empty diff");

  const auto a = text::split_lines(buggy);
  const auto b = text::split_lines(fixed);
  const auto ops = shortest_edit_script(a, b);

  PatchDiff diff;
  diff.context_radius = context_radius;
  std::size_t i = 0;
  while (i < ops.size()) {
    if (ops[i].kind == OpKind::kEqual) {
      ++i;
      continue;
    }
    Hunk h;
    h.buggy.start = ops[i].buggy_index;
    h.fixed.start = ops[i].fixed_index;
    while (i < ops.size() && ops[i].kind != OpKind::kEqual) {
      if (ops[i].kind == OpKind::kDelete) {
        h.removed.push_back(a[ops[i].buggy_index]);
      } else {
        h.added.push_back(b[ops[i].fixed_index]);
      }
      ++i;
    }
    h.buggy.count = h.removed.size();
    h.fixed.count = h.added.size();
    const std::size_t before = std::min(context_radius, h.buggy.start);
    h.context_before.assign(a.begin() + static_cast<std::ptrdiff_t>(h.buggy.start - before),
                            a.begin() + static_cast<std::ptrdiff_t>(h.buggy.start));
    const std::size_t end = h.buggy.start + h.buggy.count;
    const std::size_t after = std::min(context_radius, a.size() - end);
    h.context_after.assign(a.begin() + static_cast<std::ptrdiff_t>(end),
                           a.begin() + static_cast<std::ptrdiff_t>(end + after));
    diff.hunks.push_back(std::move(h));
  }
  if (diff.hunks.empty()) throw PreconditionError("empty diff");
  return diff;
}

std::string apply(std::string_view buggy, const PatchDiff& diff) {
  const auto lines = text::split_lines(buggy);
  std::vector<std::string> out;
  out.reserve(lines.size());
  std::size_t cursor = 0;
  for (const auto& h : diff.hunks) {
    if (h.buggy.start < cursor || h.buggy.start + h.buggy.count > lines.size() ||
        h.removed.size() != h.buggy.count || h.added.size() != h.fixed.count) {
      throw ParseError("apply: hunk range out of order or out of bounds");
    }
    out.insert(out.end(), lines.begin() + static_cast<std::ptrdiff_t>(cursor),
               lines.begin() + static_cast<std::ptrdiff_t>(h.buggy.start));
    for (std::size_t r = 0; r < h.removed.size(); ++r) {
      if (lines[h.buggy.start + r] != h.removed[r]) {
        throw ParseError("apply: removed line " + std::to_string(h.buggy.start + r + 1) +
                         " does not match");
      }
    }
    out.insert(out.end(), h.added.begin(), h.added.end());
    cursor = h.buggy.start + h.buggy.count;
  }
  out.insert(out.end(), lines.begin() + static_cast<std::ptrdiff_t>(cursor), lines.end());
  return text::join_lines(out);
}

std::string render_unified(const PatchDiff& diff) {
  std::string out;
  for (const auto& h : diff.hunks) {
    const std::size_t ctx_before = h.context_before.size();
    const std::size_t ctx_after = h.context_after.size();
    const std::size_t old_start = h.buggy.start - ctx_before + 1;
    const std::size_t new_start = h.fixed.start - ctx_before + 1;
    out += "@@ -" + std::to_string(old_start) + "," +
           std::to_string(ctx_before + h.buggy.count + ctx_after) + " +" +
           std::to_string(new_start) + "," +
           std::to_string(ctx_before + h.fixed.count + ctx_after) + " @@\n";
    for (const auto& l : h.context_before) out += " " + l + "\n";
    for (const auto& l : h.removed) out += "-" + l + "\n";
    for (const auto& l : h.added) out += "+" + l + "\n";
    for (const auto& l : h.context_after) out += " " + l + "\n";
  }
  return out;
}

nlohmann::json to_json(const PatchDiff& diff) {
  nlohmann::json hunks = nlohmann::json::array();
  for (const auto& h : diff.hunks) {
    hunks.push_back({{"buggy_start", h.buggy.start},
                     {"buggy_count", h.buggy.count},
                     {"fixed_start", h.fixed.start},
                     {"fixed_count", h.fixed.count},
                     {"removed", h.removed},
                     {"added", h.added},
                     {"context_before", h.context_before},
                     {"context_after", h.context_after}});
  }
  return {{"context_radius", diff.context_radius}, {"hunks", std::move(hunks)}};
}

PatchDiff patch_from_json(const nlohmann::json& j) {
  try {
    PatchDiff diff;
    diff.context_radius = j.at("context_radius").get<std::size_t>();
    for (const auto& hj : j.at("hunks")) {
      Hunk h;
      h.buggy = {hj.at("buggy_start").get<std::size_t>(), hj.at("buggy_count").get<std::size_t>()};
      h.fixed = {hj.at("fixed_start").get<std::size_t>(), hj.at("fixed_count").get<std::size_t>()};
      h.removed = hj.at("removed").get<std::vector<std::string>>();
      h.added = hj.at("added").get<std::vector<std::string>>();
      h.context_before = hj.value("context_before", std::vector<std::string>{});
      h.context_after = hj.value("context_after", std::vector<std::string>{});
      diff.hunks.push_back(std::move(h));
    }
    return diff;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("patch: ") + e.what());
  }
}

}  // namespace xlr::descriptor
