#include "feast/events.hpp"

#include <algorithm>

#include "feast/error.hpp"

namespace feast {

bool EventStream::is_time_sorted() const noexcept {
  return std::is_sorted(events.begin(), events.end(),
                        [](const Event& a, const Event& b) { return a.t < b.t; });
}

bool EventStream::in_bounds() const noexcept {
  return std::all_of(events.begin(), events.end(),
                     [this](const Event& e) { return e.x < width && e.y < height; });
}

Timestamp EventStream::end_time() const noexcept {
  return events.empty() ? 0 : events.back().t + 1;
}

EventStream merge_streams(std::span<const EventStream> streams) {
  EventStream out;
  if (streams.empty()) return out;
  out.width = streams.front().width;
  out.height = streams.front().height;
  std::size_t total = 0;
  for (const auto& s : streams) {
    if (s.width != out.width || s.height != out.height) {
      throw ShapeMismatchError("merge_streams: sensor dimensions differ");
    }
    total += s.size();
  }
  out.events.reserve(total);
  for (const auto& s : streams) {
    out.events.insert(out.events.end(), s.events.begin(), s.events.end());
  }
  std::stable_sort(out.events.begin(), out.events.end(),
                   [](const Event& a, const Event& b) { return a.t < b.t; });
  return out;
}

}  // namespace feast
