#include "flakyfix/unified_diff.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

namespace flakyfix {

namespace {

struct Line {
  std::string_view text;  // without the newline
  bool newline = true;
};

std::vector<Line> split(std::string_view s) {
  std::vector<Line> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto eol = s.find('\n', pos);
    if (eol == std::string_view::npos) {
      out.push_back({s.substr(pos), false});
      break;
    }
    out.push_back({s.substr(pos, eol - pos), true});
    pos = eol + 1;
  }
  return out;
}

enum class Op { keep, del, ins };

// Myers' greedy shortest edit script.
std::vector<std::pair<Op, std::size_t>> diff_ops(const std::vector<Line>& a,
                                                 const std::vector<Line>& b) {
  const auto eq = [&](std::size_t i, std::size_t j) {
    return a[i].text == b[j].text && a[i].newline == b[j].newline;
  };
  const long n = static_cast<long>(a.size());
  const long m = static_cast<long>(b.size());
  const long max = n + m;
  const long offset = max + 1;
  std::vector<long> v(2 * max + 3, 0);
  std::vector<std::vector<long>> trace;
  long found_d = -1;
  for (long d = 0; d <= max && found_d < 0; ++d) {
    trace.push_back(v);
    for (long k = -d; k <= d; k += 2) {
      long x;
      if (k == -d || (k != d && v[offset + k - 1] < v[offset + k + 1])) {
        x = v[offset + k + 1];
      } else {
        x = v[offset + k - 1] + 1;
      }
      long y = x - k;
      while (x < n && y < m && eq(static_cast<std::size_t>(x), static_cast<std::size_t>(y))) {
        ++x;
        ++y;
      }
      v[offset + k] = x;
      if (x >= n && y >= m) {
        found_d = d;
        break;
      }
    }
  }
  std::vector<std::pair<Op, std::size_t>> ops;
  long x = n, y = m;
  for (long d = found_d; d > 0; --d) {
    const auto& pv = trace[static_cast<std::size_t>(d)];
    const long k = x - y;
    long prev_k;
    if (k == -d || (k != d && pv[offset + k - 1] < pv[offset + k + 1])) {
      prev_k = k + 1;
    } else {
      prev_k = k - 1;
    }
    const long prev_x = pv[offset + prev_k];
    const long prev_y = prev_x - prev_k;
    while (x > prev_x && y > prev_y) {
      ops.emplace_back(Op::keep, static_cast<std::size_t>(--x));
      --y;
    }
    if (x == prev_x) {
      ops.emplace_back(Op::ins, static_cast<std::size_t>(--y));
    } else {
      ops.emplace_back(Op::del, static_cast<std::size_t>(--x));
    }
  }
  while (x > 0 && y > 0) {
    ops.emplace_back(Op::keep, static_cast<std::size_t>(--x));
    --y;
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

std::string range(std::size_t start, std::size_t count) {
  // Empty ranges name the line before them.
  const std::size_t first = count == 0 ? start : start + 1;
  return count == 1 ? std::to_string(first) : std::to_string(first) + "," + std::to_string(count);
}

}  // namespace

std::string unified_diff(std::string_view before, std::string_view after, const std::string& path,
                         int context) {
  if (before == after) return "";
  const auto a = split(before);
  const auto b = split(after);
  const auto ops = diff_ops(a, b);

  // Position of every op in both files.
  struct Pos {
    Op op;
    std::size_t ai, bi;
  };
  std::vector<Pos> pos;
  std::size_t ai = 0, bi = 0;
  for (const auto& [op, idx] : ops) {
    pos.push_back({op, ai, bi});
    if (op != Op::ins) ++ai;
    if (op != Op::del) ++bi;
  }

  std::ostringstream out;
  out << "--- a/" << path << "\n+++ b/" << path << "\n";
  const auto ctx = static_cast<std::size_t>(context);
  std::size_t i = 0;
  while (i < pos.size()) {
    if (pos[i].op == Op::keep) {
      ++i;
      continue;
    }
    std::size_t start = i >= ctx ? i - ctx : 0;
    while (start < i && pos[start].op != Op::keep) ++start;
    std::size_t end = i;
    // Extend while the next change is within 2*context unchanged lines.
    while (true) {
      while (end < pos.size() && pos[end].op != Op::keep) ++end;
      std::size_t gap = end;
      while (gap < pos.size() && pos[gap].op == Op::keep && gap - end < 2 * ctx) ++gap;
      if (gap < pos.size() && pos[gap].op != Op::keep) {
        end = gap;
        continue;
      }
      end = std::min(pos.size(), end + ctx);
      break;
    }
    std::size_t a_count = 0, b_count = 0;
    for (std::size_t j = start; j < end; ++j) {
      if (pos[j].op != Op::ins) ++a_count;
      if (pos[j].op != Op::del) ++b_count;
    }
    out << "@@ -" << range(pos[start].ai, a_count) << " +" << range(pos[start].bi, b_count)
        << " @@\n";
    for (std::size_t j = start; j < end; ++j) {
      const Line& line = pos[j].op == Op::ins ? b[pos[j].bi] : a[pos[j].ai];
      out << (pos[j].op == Op::keep ? ' ' : pos[j].op == Op::del ? '-' : '+') << line.text << "\n";
      if (!line.newline) out << "\\ No newline at end of file\n";
    }
    i = end;
  }
  return out.str();
}

}  // namespace flakyfix
