import { CheckResult } from './types.js';
import { DraftState } from './controller.js';
import { DEFAULT_RISK_THRESHOLDS, RiskLevel, RiskThresholds, riskLevel } from './risk.js';

export interface BannerLine {
  icon: string;
  label: string;
  detail: string;
}

/** Everything the page needs to paint the advisory area. Pure data, no DOM. */
export interface BannerModel {
  visible: boolean;
  risk: RiskLevel | null;
  lines: BannerLine[];
  notice: string | null;
}

const WARNING_STYLE: Record<string, { icon: string; label: string }> = {
  DELETE_RISK: { icon: '⚠️', label: 'Deletion risk' },
  WARN_HS: { icon: '🚫', label: 'Possible hate speech' },
  WARN_OFFENSIVE: { icon: '❗', label: 'Offensive language' },
  WARN_RUMOR: { icon: '❓', label: 'Unverified rumor' },
  WARN_SPAM: { icon: '📣', label: 'Looks like spam' },
};

const FALLBACK_STYLE = { icon: '⚠️', label: 'Warning' };

export const UNAVAILABLE_NOTICE =
  'Check unavailable right now. You can keep typing and post as usual.';

/**
 * Warnings are rendered iff a verdict is present and non-empty; the error
 * notice rides alongside and never hides or blocks anything.
 */
export function bannerModel(
  state: DraftState,
  thresholds: RiskThresholds = DEFAULT_RISK_THRESHOLDS,
): BannerModel {
  const notice = state.status === 'error' ? UNAVAILABLE_NOTICE : null;
  const result = state.lastResult;
  if (result === null || result.warnings.length === 0) {
    return { visible: false, risk: null, lines: [], notice };
  }
  const lines = result.warnings.map((warning) => {
    const style = WARNING_STYLE[warning.code] ?? FALLBACK_STYLE;
    return { icon: style.icon, label: style.label, detail: warning.message };
  });
  return { visible: true, risk: riskLevel(firedScore(result), thresholds), lines, notice };
}

// Highest score among the stages that actually raised a warning: the
// deletion stage backs DELETE_RISK, the disinformative stage backs the rest.
function firedScore(result: CheckResult): number {
  let score = -Infinity;
  for (const warning of result.warnings) {
    if (warning.code === 'DELETE_RISK') {
      score = Math.max(score, result.deletion.score);
    } else {
      score = Math.max(score, result.disinfo.score);
    }
  }
  return score;
}
