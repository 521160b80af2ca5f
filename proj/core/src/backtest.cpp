#include "tweetalpha/backtest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>

#include "tweetalpha/error.hpp"

namespace tweetalpha::backtest {
namespace {

struct Opportunity {
  Instant window;
  std::int64_t day = 0;
  Decimal move;  // close - open
};

void validate_config(const BacktestConfig& config) {
  if (config.lot_size < 1) throw config_error("backtest: lot_size must be >= 1");
  if (config.n_baselines < 1)
    throw config_error("backtest: n_baselines must be >= 1");
}

std::vector<Opportunity> opportunities(
    const std::vector<walkforward::LedgerRow>& ledger,
    const bars::BarSeries& series, TradeMode mode) {
  if (ledger.empty()) throw data_error("backtest: empty prediction ledger");
  std::vector<Opportunity> out;
  bool have_day = false;
  std::int64_t current_day = 0;
  Instant prev{0};
  for (std::size_t i = 0; i < ledger.size(); ++i) {
    const walkforward::LedgerRow& row = ledger[i];
    if (i > 0 && !(prev < row.window))
      throw data_error("backtest: ledger windows must be strictly increasing");
    prev = row.window;
    std::int64_t day = day_key(row.window);
    bool new_day = !have_day || day != current_day;
    current_day = day;
    have_day = true;
    if (mode == TradeMode::first_bar_of_day && !new_day) continue;
    const bars::Bar* bar = series.find(row.window);
    if (bar == nullptr)
      throw data_error("backtest: no bar for ledger window " +
                       format_datetime(row.window));
    Opportunity op;
    op.window = row.window;
    op.day = day;
    op.move = bar->close - bar->open;
    out.push_back(op);
  }
  return out;
}

// Ledger indices matching the opportunity list, in the same order.
std::vector<std::size_t> opportunity_indices(
    const std::vector<walkforward::LedgerRow>& ledger, TradeMode mode) {
  std::vector<std::size_t> out;
  bool have_day = false;
  std::int64_t current_day = 0;
  for (std::size_t i = 0; i < ledger.size(); ++i) {
    std::int64_t day = day_key(ledger[i].window);
    bool new_day = !have_day || day != current_day;
    current_day = day;
    have_day = true;
    if (mode == TradeMode::first_bar_of_day && !new_day) continue;
    out.push_back(i);
  }
  return out;
}

}  // namespace

BacktestResult simulate(const std::vector<walkforward::LedgerRow>& ledger,
                        const bars::BarSeries& series,
                        const BacktestConfig& config) {
  validate_config(config);
  std::vector<Opportunity> ops = opportunities(ledger, series, config.mode);
  std::vector<std::size_t> idx = opportunity_indices(ledger, config.mode);

  BacktestResult result;
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const walkforward::LedgerRow& row = ledger[idx[k]];
    TradeRecord trade;
    trade.window = ops[k].window;
    trade.direction = row.prediction == 1 ? 1 : -1;
    const bars::Bar* bar = series.find(ops[k].window);
    trade.open = bar->open;
    trade.close = bar->close;
    Decimal pnl = ops[k].move * config.lot_size;
    if (trade.direction < 0) pnl = -pnl;
    trade.pnl = pnl;
    result.total = result.total + pnl;
    if (result.days.empty() || result.days.back() != ops[k].day) {
      result.days.push_back(ops[k].day);
      result.daily_totals.push_back(Decimal{});
    }
    result.daily_totals.back() = result.daily_totals.back() + pnl;
    result.trades.push_back(trade);
  }
  return result;
}

BaselineStats random_baselines(
    const std::vector<walkforward::LedgerRow>& ledger,
    const bars::BarSeries& series, const BacktestConfig& config) {
  validate_config(config);
  std::vector<Opportunity> ops = opportunities(ledger, series, config.mode);

  BaselineStats stats;
  stats.n_baselines = config.n_baselines;
  for (const Opportunity& op : ops) {
    if (stats.days.empty() || stats.days.back() != op.day) {
      stats.days.push_back(op.day);
      stats.daily_sums.push_back(Decimal{});
    }
  }

  for (int i = 0; i < config.n_baselines; ++i) {
    std::mt19937_64 engine(config.base_seed + static_cast<std::uint64_t>(i));
    Decimal total;
    std::size_t day_slot = 0;
    for (std::size_t k = 0; k < ops.size(); ++k) {
      while (stats.days[day_slot] != ops[k].day) ++day_slot;
      Decimal pnl = ops[k].move * config.lot_size;
      if ((engine() & 1ull) == 0) pnl = -pnl;  // low bit set = long
      total = total + pnl;
      stats.daily_sums[day_slot] = stats.daily_sums[day_slot] + pnl;
    }
    stats.totals.push_back(total);
    stats.sum = stats.sum + total;
  }
  return stats;
}

Comparison compare(const BacktestResult& model, const BaselineStats& baselines) {
  if (model.days != baselines.days)
    throw data_error("backtest: model and baseline day sets differ");
  if (baselines.n_baselines < 1) throw data_error("backtest: no baselines");

  Comparison cmp;
  cmp.model_total = model.total;
  cmp.baseline_sum = baselines.sum;
  cmp.n_baselines = baselines.n_baselines;
  cmp.baseline_mean = baselines.sum.divided_by(baselines.n_baselines);
  cmp.excess = model.total - cmp.baseline_mean;

  Decimal scaled_total = model.total * baselines.n_baselines;
  Decimal diff = scaled_total - baselines.sum;
  cmp.excess_sign = diff.units() > 0 ? 1 : diff.units() < 0 ? -1 : 0;

  for (std::size_t d = 0; d < model.days.size(); ++d) {
    Decimal scaled = model.daily_totals[d] * baselines.n_baselines;
    Decimal day_diff = scaled - baselines.daily_sums[d];
    if (day_diff.units() > 0)
      ++cmp.days_model_wins;
    else if (day_diff.units() < 0)
      ++cmp.days_model_loses;
    else
      ++cmp.days_tied;
  }

  cmp.n_trades = model.trades.size();
  cmp.model_mean_per_trade =
      model.total.divided_by(static_cast<std::int64_t>(cmp.n_trades));
  cmp.baseline_mean_per_trade = baselines.sum.divided_by(
      static_cast<std::int64_t>(cmp.n_trades) * baselines.n_baselines);
  return cmp;
}

std::vector<EquityPoint> equity_curve(const BacktestResult& model,
                                      const BaselineStats& baselines) {
  if (model.days != baselines.days)
    throw data_error("backtest: model and baseline day sets differ");
  std::vector<EquityPoint> points;
  Decimal model_cum;
  Decimal baseline_cum;
  for (std::size_t d = 0; d < model.days.size(); ++d) {
    model_cum = model_cum + model.daily_totals[d];
    baseline_cum = baseline_cum + baselines.daily_sums[d];
    EquityPoint pt;
    pt.day = model.days[d];
    pt.model = model_cum;
    pt.baseline_mean = baseline_cum.divided_by(baselines.n_baselines);
    points.push_back(pt);
  }
  return points;
}

std::string equity_csv(const std::vector<EquityPoint>& points,
                       const std::string& comment) {
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  out += "date,model_equity,baseline_mean_equity\n";
  for (const EquityPoint& pt : points) {
    out += format_date(start_of_day_key(pt.day));
    out += ',';
    out += pt.model.to_string();
    out += ',';
    out += pt.baseline_mean.to_string();
    out += '\n';
  }
  return out;
}

namespace {

std::string fixed2(double v) {
  char buf[48];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string equity_svg(const std::vector<EquityPoint>& points,
                       const std::string& comment) {
  if (points.empty()) throw data_error("equity chart: no points");

  constexpr double kWidth = 860.0, kHeight = 460.0;
  constexpr double kLeft = 70.0, kRight = 840.0, kTop = 20.0, kBottom = 420.0;

  double lo = points[0].model.to_double();
  double hi = lo;
  for (const EquityPoint& pt : points) {
    for (double v : {pt.model.to_double(), pt.baseline_mean.to_double(), 0.0}) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  double pad = (hi - lo) * 0.05;
  if (pad == 0.0) pad = 1.0;
  lo -= pad;
  hi += pad;

  auto x_at = [&points](std::size_t i) {
    if (points.size() == 1) return (kLeft + kRight) / 2.0;
    return kLeft + (kRight - kLeft) * static_cast<double>(i) /
                       static_cast<double>(points.size() - 1);
  };
  auto y_at = [lo, hi](double v) {
    return kBottom - (kBottom - kTop) * (v - lo) / (hi - lo);
  };

  auto polyline = [&](bool model_series) {
    std::string pts;
    for (std::size_t i = 0; i < points.size(); ++i) {
      double v = model_series ? points[i].model.to_double()
                              : points[i].baseline_mean.to_double();
      if (!pts.empty()) pts += ' ';
      pts += fixed2(x_at(i)) + ',' + fixed2(y_at(v));
    }
    return pts;
  };

  auto date_label = [](std::int64_t day) {
    return format_date(start_of_day_key(day));
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " +
         fixed2(kWidth) + " " + fixed2(kHeight) + "\">\n";
  if (!comment.empty()) svg += "<!-- " + comment + " -->\n";
  svg += "<rect x=\"" + fixed2(kLeft) + "\" y=\"" + fixed2(kTop) +
         "\" width=\"" + fixed2(kRight - kLeft) + "\" height=\"" +
         fixed2(kBottom - kTop) +
         "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
  double zero_y = y_at(0.0);
  svg += "<line x1=\"" + fixed2(kLeft) + "\" y1=\"" + fixed2(zero_y) +
         "\" x2=\"" + fixed2(kRight) + "\" y2=\"" + fixed2(zero_y) +
         "\" stroke=\"#bbbbbb\" stroke-width=\"1\" stroke-dasharray=\"2,3\"/>\n";
  if (points.size() == 1) {
    svg += "<circle cx=\"" + fixed2(x_at(0)) + "\" cy=\"" +
           fixed2(y_at(points[0].model.to_double())) +
           "\" r=\"3\" fill=\"#1f6feb\"/>\n";
    svg += "<circle cx=\"" + fixed2(x_at(0)) + "\" cy=\"" +
           fixed2(y_at(points[0].baseline_mean.to_double())) +
           "\" r=\"3\" fill=\"#8b949e\"/>\n";
  } else {
    svg += "<polyline fill=\"none\" stroke=\"#1f6feb\" stroke-width=\"1.5\" "
           "points=\"" +
           polyline(true) + "\"/>\n";
    svg += "<polyline fill=\"none\" stroke=\"#8b949e\" stroke-width=\"1.5\" "
           "stroke-dasharray=\"5,3\" points=\"" +
           polyline(false) + "\"/>\n";
  }
  svg += "<text x=\"" + fixed2(kLeft - 6.0) + "\" y=\"" + fixed2(kBottom) +
         "\" text-anchor=\"end\" font-size=\"12\" font-family=\"monospace\">" +
         fixed2(lo) + "</text>\n";
  svg += "<text x=\"" + fixed2(kLeft - 6.0) + "\" y=\"" + fixed2(kTop + 10.0) +
         "\" text-anchor=\"end\" font-size=\"12\" font-family=\"monospace\">" +
         fixed2(hi) + "</text>\n";
  svg += "<text x=\"" + fixed2(kLeft) + "\" y=\"" + fixed2(kBottom + 16.0) +
         "\" font-size=\"12\" font-family=\"monospace\">" +
         date_label(points.front().day) + "</text>\n";
  svg += "<text x=\"" + fixed2(kRight) + "\" y=\"" + fixed2(kBottom + 16.0) +
         "\" text-anchor=\"end\" font-size=\"12\" font-family=\"monospace\">" +
         date_label(points.back().day) + "</text>\n";
  svg += "<text x=\"" + fixed2(kLeft + 10.0) + "\" y=\"" +
         fixed2(kBottom + 36.0) +
         "\" font-size=\"12\" font-family=\"monospace\" fill=\"#1f6feb\">"
         "model</text>\n";
  svg += "<text x=\"" + fixed2(kLeft + 80.0) + "\" y=\"" +
         fixed2(kBottom + 36.0) +
         "\" font-size=\"12\" font-family=\"monospace\" fill=\"#8b949e\">"
         "baseline mean</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace tweetalpha::backtest
