export type RiskLevel = 'low' | 'medium' | 'high';

/** Cut points are inclusive lower bounds: score >= high is high, then medium. */
export interface RiskThresholds {
  medium: number;
  high: number;
}

export const DEFAULT_RISK_THRESHOLDS: RiskThresholds = { medium: 0.5, high: 1.5 };

export function riskLevel(
  score: number,
  thresholds: RiskThresholds = DEFAULT_RISK_THRESHOLDS,
): RiskLevel {
  if (!(thresholds.medium <= thresholds.high)) {
    throw new RangeError('risk thresholds must satisfy medium <= high');
  }
  if (score >= thresholds.high) return 'high';
  if (score >= thresholds.medium) return 'medium';
  return 'low';
}
