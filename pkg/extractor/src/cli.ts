#!/usr/bin/env node
/** CLI for the embedding/alignment exporter.
 *
 * Exit codes mirror the analysis toolkit: 0 success, 1 usage/config error,
 * 2 partial data failure (failed files listed on stderr, run continues).
 */

import { readFileSync, writeFileSync, mkdirSync } from 'node:fs'
import { basename, extname, join } from 'node:path'
import { fileURLToPath } from 'node:url'

import { encodeAlignment } from './alignment.js'
import { loadCheckpoint } from './checkpoint.js'
import { extractEmbeddings } from './extractor.js'
import { loadRuleTable, parsePhoneFile, syllabify } from './syllabify.js'

const USAGE = `usage:
  sylkit-extract extract --checkpoint MODEL.json --layer N --out-dir DIR audio.wav [...]
  sylkit-extract export-alignments --rules RULES.json --out-dir DIR phones.tsv [...]
`

interface ParsedArgs {
	flags: Map<string, string>
	positionals: string[]
}

function parseArgs(argv: string[], flagNames: Set<string>): ParsedArgs {
	const flags = new Map<string, string>()
	const positionals: string[] = []
	for (let i = 0; i < argv.length; i++) {
		const arg = argv[i]
		if (arg.startsWith('--')) {
			if (!flagNames.has(arg)) {
				throw new UsageError(`unknown flag ${arg}`)
			}
			const value = argv[++i]
			if (value === undefined) {
				throw new UsageError(`${arg} needs a value`)
			}
			flags.set(arg, value)
		} else {
			positionals.push(arg)
		}
	}
	return { flags, positionals }
}

class UsageError extends Error {}

function requireFlag(args: ParsedArgs, name: string): string {
	const value = args.flags.get(name)
	if (value === undefined) {
		throw new UsageError(`missing required flag ${name}`)
	}
	return value
}

function runExtract(argv: string[]): number {
	const args = parseArgs(argv, new Set(['--checkpoint', '--layer', '--out-dir']))
	const checkpoint = loadCheckpoint(requireFlag(args, '--checkpoint'))
	const layer = Number(requireFlag(args, '--layer'))
	const outDir = requireFlag(args, '--out-dir')
	if (args.positionals.length === 0) {
		throw new UsageError('no audio files given')
	}
	const outcomes = extractEmbeddings(checkpoint, layer, args.positionals, outDir)
	let failures = 0
	for (const outcome of outcomes) {
		if (outcome.error) {
			failures++
			console.error(`sylkit-extract: error: ${outcome.audioPath}: ${outcome.error}`)
		} else {
			console.log(`${outcome.outputPath}\t${outcome.nFrames} frames`)
		}
	}
	return failures > 0 ? 2 : 0
}

function runExportAlignments(argv: string[]): number {
	const args = parseArgs(argv, new Set(['--rules', '--out-dir']))
	const rules = loadRuleTable(args.flags.get('--rules') ?? defaultRulesPath())
	const outDir = requireFlag(args, '--out-dir')
	if (args.positionals.length === 0) {
		throw new UsageError('no phone alignment files given')
	}
	mkdirSync(outDir, { recursive: true })
	let failures = 0
	for (const path of args.positionals) {
		try {
			const phones = parsePhoneFile(readFileSync(path, 'utf-8'))
			const syllables = syllabify(phones, rules)
			const stem = basename(path, extname(path))
			const outPath = join(outDir, `${stem}.ali`)
			writeFileSync(outPath, encodeAlignment(syllables))
			console.log(`${outPath}\t${syllables.length} syllables`)
		} catch (error) {
			failures++
			console.error(`sylkit-extract: error: ${path}: ${error}`)
		}
	}
	return failures > 0 ? 2 : 0
}

export function defaultRulesPath(): string {
	return fileURLToPath(new URL('../../data/syllable_rules.json', import.meta.url))
}

export function main(argv: string[]): number {
	try {
		const [command, ...rest] = argv
		if (command === 'extract') {
			return runExtract(rest)
		}
		if (command === 'export-alignments') {
			return runExportAlignments(rest)
		}
		process.stderr.write(USAGE)
		return 1
	} catch (error) {
		if (error instanceof UsageError) {
			console.error(`sylkit-extract: usage error: ${error.message}`)
		} else {
			console.error(`sylkit-extract: error: ${error}`)
		}
		return 1
	}
}

if (process.argv[1] && fileURLToPath(import.meta.url) === process.argv[1]) {
	process.exit(main(process.argv.slice(2)))
}
