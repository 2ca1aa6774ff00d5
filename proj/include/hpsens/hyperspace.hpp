#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hps {

/// One level of a hyperparameter axis: numeric or categorical.
using AxisValue = std::variant<double, std::string>;

/// Shortest round-trip text form (numbers via to_chars, text verbatim).
std::string format_axis_value(const AxisValue& value);

struct Axis {
  std::string name;
  std::vector<AxisValue> values;
};

/// A point of the grid: one level index per axis of the owning HyperSpace.
struct SettingCoord {
  std::vector<std::uint32_t> indices;

  auto operator<=>(const SettingCoord&) const = default;
  bool operator==(const SettingCoord&) const = default;
};

/// Ordered Cartesian grid of hyperparameter axes.
///
/// Settings are also addressed by a row-major linear index (first axis most
/// significant), so ascending linear order is lexicographic SettingCoord order.
class HyperSpace {
 public:
  HyperSpace() = default;
  /// Validates unique axis names, non-empty axes and unique values per axis.
  explicit HyperSpace(std::vector<Axis> axes);

  const std::vector<Axis>& axes() const noexcept { return axes_; }
  std::size_t axis_count() const noexcept { return axes_.size(); }
  std::size_t axis_size(std::size_t axis) const { return axes_.at(axis).values.size(); }
  std::size_t setting_count() const noexcept { return setting_count_; }

  std::optional<std::size_t> find_axis(const std::string& name) const;
  /// Numeric levels match within 1e-9 relative; text levels match exactly.
  std::optional<std::uint32_t> find_value(std::size_t axis, const AxisValue& value) const;

  bool contains(const SettingCoord& coord) const noexcept;
  std::size_t linear_index(const SettingCoord& coord) const;
  SettingCoord coord_of(std::size_t linear) const;
  /// Level index of `axis` in the setting with the given linear index.
  std::uint32_t level(std::size_t linear, std::size_t axis) const noexcept {
    return static_cast<std::uint32_t>((linear / strides_[axis]) % axes_[axis].values.size());
  }

  bool operator==(const HyperSpace& other) const;

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::size_t setting_count_ = 1;
};

}  // namespace hps
