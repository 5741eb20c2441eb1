import { afterEach, describe, expect, it, vi } from "vitest";

import { HttpService, LatestGate, ServiceError } from "../src/client";

describe("LatestGate", () => {
  it("coalesces values submitted while a request is pending", async () => {
    const sent: number[] = [];
    const applied: number[] = [];
    let release!: () => void;
    const firstDone = new Promise<void>((r) => (release = r));
    const gate = new LatestGate<number, number>(
      async (v) => {
        sent.push(v);
        if (sent.length === 1) await firstDone;
        return v;
      },
      (r) => applied.push(r),
    );
    gate.submit(1);
    gate.submit(2);
    gate.submit(3);
    expect(sent).toEqual([1]);
    release();
    await Promise.resolve();
    await Promise.resolve();
    await Promise.resolve();
    expect(sent).toEqual([1, 3]);
    expect(applied).toEqual([1, 3]);
  });

  it("recovers after a failed request", async () => {
    const applied: number[] = [];
    let fail = true;
    const gate = new LatestGate<number, number>(
      async (v) => {
        if (fail) throw new Error("boom");
        return v;
      },
      (r) => applied.push(r),
    );
    gate.submit(1);
    await Promise.resolve();
    await Promise.resolve();
    fail = false;
    gate.submit(2);
    await Promise.resolve();
    await Promise.resolve();
    expect(applied).toEqual([2]);
    expect(gate.pending).toBe(false);
  });
});

describe("HttpService error handling", () => {
  afterEach(() => {
    vi.unstubAllGlobals();
  });

  it("unwraps the service error envelope", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => ({
        ok: false,
        status: 409,
        json: async () => ({
          error: { code: "missing_side", message: "missing side unaffected" },
        }),
      })),
    );
    const service = new HttpService("http://x");
    await expect(service.createComparison("P1", "m")).rejects.toMatchObject({
      code: "missing_side",
      status: 409,
    });
  });

  it("parses successful JSON bodies", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async (url: string) => {
        expect(url).toBe("http://x/catalog?patient=P１".replace("１", "1"));
        return {
          ok: true,
          status: 200,
          json: async () => ({ items: [], facets: {}, total: 0, offset: 0, limit: 100 }),
        };
      }),
    );
    const service = new HttpService("http://x");
    const result = await service.catalog({ patient: "P1" });
    expect(result.total).toBe(0);
  });

  it("survives non-JSON error bodies", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => ({
        ok: false,
        status: 502,
        json: async () => {
          throw new Error("not json");
        },
      })),
    );
    const service = new HttpService("http://x");
    await expect(service.getComparison("h")).rejects.toBeInstanceOf(ServiceError);
  });
});
