#pragma once

#include "wavekit/dataset.hpp"
#include "wavekit/signal.hpp"

#include <optional>

namespace wavekit {

/// Double-integrates every acceleration channel into the matching
/// displacement channel, then removes drift with `drift` when set. Throws
/// ValidationError when no line carries an acceleration channel.
ScanDataset integrate_dataset(const ScanDataset& dataset, const std::optional<FilterSpec>& drift = kDriftFilter);

/// Band-pass filters every displacement channel. Throws ValidationError when
/// the dataset has no displacement channel.
ScanDataset mode_filter_dataset(const ScanDataset& dataset, const FilterSpec& band = kSecondVerticalBendingBand);

}  // namespace wavekit
