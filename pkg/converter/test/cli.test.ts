import { execFileSync } from "node:child_process";
import { existsSync, mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { buildFixture } from "./fixture.js";

const CLI = join(dirname(fileURLToPath(import.meta.url)), "..", "dist", "cli.js");

function runCli(args: string[]): { code: number; stdout: string; stderr: string } {
  try {
    const stdout = execFileSync("node", [CLI, ...args], { encoding: "utf-8" });
    return { code: 0, stdout, stderr: "" };
  } catch (err) {
    const e = err as { status?: number; stdout?: string; stderr?: string };
    return { code: e.status ?? -1, stdout: e.stdout ?? "", stderr: e.stderr ?? "" };
  }
}

function fixtureFile(): { dir: string; nc: string } {
  const dir = mkdtempSync(join(tmpdir(), "hqgd-cli-"));
  const nc = join(dir, "toy.nc");
  writeFileSync(nc, buildFixture());
  return { dir, nc };
}

describe("cli", () => {
  it("is built (run npm run build before the tests)", () => {
    expect(existsSync(CLI)).toBe(true);
  });

  it("converts and verifies end to end", () => {
    const { dir, nc } = fixtureFile();
    const out = join(dir, "toy.hqgd");
    const conv = runCli([
      "convert", "--input", nc, "--baseline-first", "1950", "--baseline-last", "1952", "--out", out,
    ]);
    expect(conv.code).toBe(0);
    expect(conv.stdout).toContain("33 samples");
    expect(conv.stdout).toContain("1656 nodes");

    const ver = runCli(["verify", out]);
    expect(ver.code).toBe(0);
    expect(ver.stdout).toContain("non-finite features: 0");
    expect(ver.stdout).toContain("samples per target month:");
  });

  it("exits 1 on missing required flags", () => {
    const { nc } = fixtureFile();
    const r = runCli(["convert", "--input", nc]);
    expect(r.code).toBe(1);
  });

  it("exits 1 on a baseline outside coverage", () => {
    const { dir, nc } = fixtureFile();
    const r = runCli([
      "convert", "--input", nc, "--baseline-first", "1940", "--baseline-last", "1941",
      "--out", join(dir, "x.hqgd"),
    ]);
    expect(r.code).toBe(1);
    expect(r.stderr).toContain("baseline");
  });

  it("exits 1 on a missing variable name", () => {
    const { dir, nc } = fixtureFile();
    const r = runCli([
      "convert", "--input", nc, "--variable", "tos",
      "--baseline-first", "1950", "--baseline-last", "1952", "--out", join(dir, "x.hqgd"),
    ]);
    expect(r.code).toBe(1);
    expect(r.stderr).toContain("tos");
  });

  it("exits 2 on an unreadable input path", () => {
    const { dir } = fixtureFile();
    const r = runCli([
      "convert", "--input", join(dir, "missing.nc"),
      "--baseline-first", "1950", "--baseline-last", "1952", "--out", join(dir, "x.hqgd"),
    ]);
    expect(r.code).toBe(2);
  });

  it("exits 2 on a malformed verify target", () => {
    const { dir } = fixtureFile();
    const bad = join(dir, "bad.hqgd");
    writeFileSync(bad, Buffer.from("not a dataset"));
    const r = runCli(["verify", bad]);
    expect(r.code).toBe(2);
    expect(r.stderr).toContain("HQGD");
  });
});
