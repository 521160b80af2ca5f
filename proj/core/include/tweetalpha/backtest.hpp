#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tweetalpha/bars.hpp"
#include "tweetalpha/decimal.hpp"
#include "tweetalpha/time.hpp"
#include "tweetalpha/walkforward.hpp"

namespace tweetalpha::backtest {

enum class TradeMode { per_bar, first_bar_of_day };

struct BacktestConfig {
  std::int64_t lot_size = 100;
  TradeMode mode = TradeMode::per_bar;
  std::uint64_t base_seed = 4321;  // baseline i uses base_seed + i
  int n_baselines = 100;
};

struct TradeRecord {
  Instant window;
  int direction = 0;  // +1 long, -1 short
  Decimal open;
  Decimal close;
  Decimal pnl;  // lot_size * (close - open) * direction, no fees

  friend bool operator==(const TradeRecord&, const TradeRecord&) = default;
};

struct BacktestResult {
  std::vector<TradeRecord> trades;
  Decimal total;
  std::vector<std::int64_t> days;     // day keys, ascending
  std::vector<Decimal> daily_totals;  // aligned with days
};

/// Long when the ledger predicts up, short otherwise; each trade opens at the
/// bar open and closes at the bar close. first_bar_of_day trades only the
/// first ledger window of each day.
BacktestResult simulate(const std::vector<walkforward::LedgerRow>& ledger,
                        const bars::BarSeries& series,
                        const BacktestConfig& config);

struct BaselineStats {
  int n_baselines = 0;
  std::vector<Decimal> totals;        // one per baseline
  Decimal sum;                        // exact sum of totals
  std::vector<std::int64_t> days;     // same day set as the model result
  std::vector<Decimal> daily_sums;    // per day, summed across baselines
};

/// Coin-flip baselines over the same trade opportunities: baseline i draws
/// one value per trade from mt19937_64 seeded base_seed + i and goes long on
/// a set low bit.
BaselineStats random_baselines(const std::vector<walkforward::LedgerRow>& ledger,
                               const bars::BarSeries& series,
                               const BacktestConfig& config);

struct Comparison {
  Decimal model_total;
  Decimal baseline_sum;
  int n_baselines = 0;
  Decimal baseline_mean;  // baseline_sum / n, half-even
  Decimal excess;         // model_total - baseline_mean
  int excess_sign = 0;    // exact: sign(model_total * n - baseline_sum)
  std::size_t days_model_wins = 0;
  std::size_t days_model_loses = 0;
  std::size_t days_tied = 0;
  std::size_t n_trades = 0;
  Decimal model_mean_per_trade;     // half-even
  Decimal baseline_mean_per_trade;  // half-even, across baselines and trades
};

/// Daily win/loss/tie compares model_day * n against the baseline day sum so
/// the verdict never depends on division rounding.
Comparison compare(const BacktestResult& model, const BaselineStats& baselines);

struct EquityPoint {
  std::int64_t day = 0;
  Decimal model;          // cumulative model P&L after this day
  Decimal baseline_mean;  // cumulative baseline sum / n, half-even
};

std::vector<EquityPoint> equity_curve(const BacktestResult& model,
                                      const BaselineStats& baselines);

/// "date,model_equity,baseline_mean_equity" CSV; optional "# comment" line.
std::string equity_csv(const std::vector<EquityPoint>& points,
                       const std::string& comment = "");

/// Self-contained line chart; byte-deterministic for identical inputs. The
/// comment is embedded as an XML comment.
std::string equity_svg(const std::vector<EquityPoint>& points,
                       const std::string& comment = "");

}  // namespace tweetalpha::backtest
