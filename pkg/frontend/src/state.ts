/**
 * Pure view-model derivation. The UI keeps no algorithmic state of its own:
 * everything below is a function of the latest API responses, so reloading
 * the page rebuilds the identical view.
 */

import type { SessionSummary } from "./api.js";

export type BadgeKind = "annotated" | "suggested" | "predicted" | "none";

export interface FrameBadge {
  frame: number;
  kind: BadgeKind;
  /** 1-based importance rank, present only for suggested frames. */
  rank?: number;
  score?: number;
}

export interface Suggestion {
  frame: number;
  score: number;
}

/**
 * One badge per frame. Annotated wins over suggested; anything else shows
 * as predicted once predictions are fresh.
 */
export function deriveBadges(
  summary: SessionSummary,
  suggestions: Suggestion[] = summary.last_suggestions ?? [],
): FrameBadge[] {
  const annotated = new Set(summary.annotated_frames);
  const rankOf = new Map<number, number>();
  const scoreOf = new Map<number, number>();
  suggestions.forEach((s, i) => {
    if (!rankOf.has(s.frame)) {
      rankOf.set(s.frame, i + 1);
      scoreOf.set(s.frame, s.score);
    }
  });
  const badges: FrameBadge[] = [];
  for (let frame = 0; frame < summary.num_frames; frame++) {
    if (annotated.has(frame)) {
      badges.push({ frame, kind: "annotated" });
    } else if (rankOf.has(frame)) {
      badges.push({
        frame,
        kind: "suggested",
        rank: rankOf.get(frame),
        score: scoreOf.get(frame),
      });
    } else if (summary.predictions_fresh) {
      badges.push({ frame, kind: "predicted" });
    } else {
      badges.push({ frame, kind: "none" });
    }
  }
  return badges;
}

export function suggestedInRankOrder(badges: FrameBadge[]): FrameBadge[] {
  return badges
    .filter((b) => b.kind === "suggested")
    .sort((a, b) => (a.rank ?? 0) - (b.rank ?? 0));
}

/** Frames whose timeline thumbnail needs a stale marker after an edit. */
export function isStale(summary: SessionSummary): boolean {
  return summary.annotated_frames.length > 0 && !summary.predictions_fresh;
}

export function clampFrame(summary: SessionSummary, frame: number): number {
  return Math.max(0, Math.min(summary.num_frames - 1, frame));
}
