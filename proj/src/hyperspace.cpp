#include "hpsens/hyperspace.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <set>

#include "hpsens/error.hpp"

namespace hps {

namespace {

bool same_value(const AxisValue& a, const AxisValue& b) {
  if (a.index() != b.index()) return false;
  if (const auto* x = std::get_if<double>(&a)) {
    const double y = std::get<double>(b);
    if (*x == y) return true;
    return std::abs(*x - y) <= 1e-9 * std::max(std::abs(*x), std::abs(y));
  }
  return std::get<std::string>(a) == std::get<std::string>(b);
}

}  // namespace

std::string format_axis_value(const AxisValue& value) {
  if (const auto* s = std::get_if<std::string>(&value)) return *s;
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), std::get<double>(value));
  return std::string(buf.data(), end);
}

HyperSpace::HyperSpace(std::vector<Axis> axes) : axes_(std::move(axes)) {
  std::set<std::string> names;
  for (const auto& axis : axes_) {
    if (axis.name.empty()) throw Error(ErrorKind::InvalidArgument, "axis with empty name");
    if (!names.insert(axis.name).second)
      throw Error(ErrorKind::InvalidArgument, "duplicate axis name '" + axis.name + "'");
    if (axis.values.empty()) throw Error(ErrorKind::InvalidArgument, "axis '" + axis.name + "' has no values");
    for (std::size_t i = 0; i < axis.values.size(); ++i)
      for (std::size_t j = i + 1; j < axis.values.size(); ++j)
        if (same_value(axis.values[i], axis.values[j]))
          throw Error(ErrorKind::InvalidArgument, "axis '" + axis.name + "' repeats value " +
                                                      format_axis_value(axis.values[i]));
  }
  strides_.assign(axes_.size(), 1);
  setting_count_ = 1;
  for (std::size_t k = axes_.size(); k-- > 0;) {
    strides_[k] = setting_count_;
    setting_count_ *= axes_[k].values.size();
  }
}

std::optional<std::size_t> HyperSpace::find_axis(const std::string& name) const {
  for (std::size_t i = 0; i < axes_.size(); ++i)
    if (axes_[i].name == name) return i;
  return std::nullopt;
}

std::optional<std::uint32_t> HyperSpace::find_value(std::size_t axis, const AxisValue& value) const {
  const auto& values = axes_.at(axis).values;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (same_value(values[i], value)) return static_cast<std::uint32_t>(i);
  return std::nullopt;
}

bool HyperSpace::contains(const SettingCoord& coord) const noexcept {
  if (coord.indices.size() != axes_.size()) return false;
  for (std::size_t i = 0; i < axes_.size(); ++i)
    if (coord.indices[i] >= axes_[i].values.size()) return false;
  return true;
}

std::size_t HyperSpace::linear_index(const SettingCoord& coord) const {
  if (!contains(coord)) throw Error(ErrorKind::InvalidArgument, "setting coordinate outside the hyperparameter space");
  std::size_t linear = 0;
  for (std::size_t i = 0; i < axes_.size(); ++i) linear += coord.indices[i] * strides_[i];
  return linear;
}

SettingCoord HyperSpace::coord_of(std::size_t linear) const {
  if (linear >= setting_count_) throw Error(ErrorKind::InvalidArgument, "linear setting index out of range");
  SettingCoord coord;
  coord.indices.resize(axes_.size());
  for (std::size_t i = 0; i < axes_.size(); ++i) coord.indices[i] = level(linear, i);
  return coord;
}

bool HyperSpace::operator==(const HyperSpace& other) const {
  if (axes_.size() != other.axes_.size()) return false;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (axes_[i].name != other.axes_[i].name || axes_[i].values.size() != other.axes_[i].values.size()) return false;
    for (std::size_t j = 0; j < axes_[i].values.size(); ++j)
      if (!same_value(axes_[i].values[j], other.axes_[i].values[j])) return false;
  }
  return true;
}

}  // namespace hps
