// Wire types for the moderation service. Field names match the JSON bodies
// exactly, including model_fingerprint staying snake_case.

export interface StageVerdict {
  label: string;
  score: number;
}

export interface CheckWarning {
  code: string;
  message: string;
}

export interface CheckResult {
  deletion: StageVerdict;
  disinfo: StageVerdict;
  /** null whenever the disinformative stage did not fire. */
  reason: StageVerdict | null;
  warnings: CheckWarning[];
  model_fingerprint: string;
}

export interface HealthStatus {
  status: string;
  fingerprints: Record<string, string>;
}
