import { describe, expect, it } from "vitest";

import type { SessionSummary } from "../src/api.js";
import { clampFrame, deriveBadges, isStale, suggestedInRankOrder } from "../src/state.js";

function summary(partial: Partial<SessionSummary> = {}): SessionSummary {
  return {
    id: "s1",
    frames_dir: "/tmp/frames",
    num_frames: 6,
    num_objects: 1,
    frame_height: 72,
    frame_width: 120,
    revision: 0,
    annotations_revision: 0,
    predictions_revision: 0,
    predictions_fresh: false,
    annotated_frames: [],
    last_suggestions: [],
    config: {},
    ...partial,
  };
}

describe("deriveBadges", () => {
  it("fresh session shows zero badges", () => {
    const badges = deriveBadges(summary());
    expect(badges).toHaveLength(6);
    expect(badges.every((b) => b.kind === "none")).toBe(true);
  });

  it("ranks suggestions in API order", () => {
    const badges = deriveBadges(
      summary({ predictions_fresh: true, annotated_frames: [0] }),
      [
        { frame: 4, score: 0.5 },
        { frame: 2, score: 0.3 },
        { frame: 5, score: 0.1 },
      ],
    );
    const ranked = suggestedInRankOrder(badges);
    expect(ranked.map((b) => b.frame)).toEqual([4, 2, 5]);
    expect(ranked.map((b) => b.rank)).toEqual([1, 2, 3]);
    expect(badges[0].kind).toBe("annotated");
    expect(badges[1].kind).toBe("predicted");
  });

  it("annotation wins over suggestion after the user annotates it", () => {
    const before = deriveBadges(
      summary({ predictions_fresh: true, annotated_frames: [0] }),
      [{ frame: 3, score: 0.2 }],
    );
    expect(before[3].kind).toBe("suggested");
    const after = deriveBadges(
      summary({ predictions_fresh: true, annotated_frames: [0, 3] }),
      [{ frame: 3, score: 0.2 }],
    );
    expect(after[3].kind).toBe("annotated");
  });

  it("uses last_suggestions from the summary by default", () => {
    const badges = deriveBadges(
      summary({
        predictions_fresh: true,
        last_suggestions: [{ frame: 1, score: 0.9 }],
      }),
    );
    expect(badges[1]).toMatchObject({ kind: "suggested", rank: 1, score: 0.9 });
  });
});

describe("staleness and clamping", () => {
  it("stale once annotated without fresh predictions", () => {
    expect(isStale(summary())).toBe(false);
    expect(isStale(summary({ annotated_frames: [0] }))).toBe(true);
    expect(
      isStale(summary({ annotated_frames: [0], predictions_fresh: true })),
    ).toBe(false);
  });

  it("clamps frame navigation", () => {
    expect(clampFrame(summary(), -3)).toBe(0);
    expect(clampFrame(summary(), 99)).toBe(5);
    expect(clampFrame(summary(), 2)).toBe(2);
  });
});
