import assert from 'node:assert/strict'
import { readFileSync } from 'node:fs'
import { test } from 'node:test'

import { decodeAlignment, encodeAlignment } from '../src/alignment.js'
import { defaultRulesPath } from '../src/cli.js'
import {
	parsePhoneFile,
	parseRuleTable,
	syllabify,
	SyllabifyError,
} from '../src/syllabify.js'

const rules = parseRuleTable(readFileSync(defaultRulesPath(), 'utf-8'))

function phones(spec: [number, number, string][]) {
	return spec.map(([startSec, endSec, phone]) => ({ startSec, endSec, phone }))
}

test('single-syllable word maps to one entry', () => {
	const entries = syllabify(phones([
		[0.0, 0.08, 'K'],
		[0.08, 0.2, 'AE1'],
		[0.2, 0.31, 'T'],
	]), rules)
	assert.equal(entries.length, 1)
	assert.deepEqual(entries[0], { startSec: 0.0, endSec: 0.31, label: 'K-AE-T' })
})

test('empty transcript yields empty alignment', () => {
	assert.deepEqual(syllabify([], rules), [])
	assert.equal(encodeAlignment([]), '')
})

test('overlapping source spans are rejected', () => {
	assert.throws(() => parsePhoneFile('0.0\t0.2\tK\n0.1\t0.3\tAE1\n'), SyllabifyError)
})

test('onset maximization splits intervocalic clusters', () => {
	// AE . S T R IH (S T R is a legal onset, so it all moves right)
	const entries = syllabify(phones([
		[0.0, 0.1, 'AE1'],
		[0.1, 0.2, 'S'],
		[0.2, 0.3, 'T'],
		[0.3, 0.4, 'R'],
		[0.4, 0.5, 'IH0'],
	]), rules)
	assert.deepEqual(entries.map(e => e.label), ['AE', 'S-T-R-IH'])
	assert.equal(entries[0].endSec, 0.1)
	assert.equal(entries[1].startSec, 0.1)
})

test('illegal clusters leave a coda behind', () => {
	// IH N S T AH N T -> IH-N / S-T-AH-N-T ("NST" is not an onset, "ST" is)
	const entries = syllabify(phones([
		[0.0, 0.05, 'IH1'],
		[0.05, 0.1, 'N'],
		[0.1, 0.15, 'S'],
		[0.15, 0.2, 'T'],
		[0.2, 0.3, 'AH0'],
		[0.3, 0.35, 'N'],
		[0.35, 0.4, 'T'],
	]), rules)
	assert.deepEqual(entries.map(e => e.label), ['IH-N', 'S-T-AH-N-T'])
})

test('silence breaks syllable grouping', () => {
	const entries = syllabify(phones([
		[0.0, 0.1, 'G'],
		[0.1, 0.2, 'OW1'],
		[0.2, 0.5, 'sil'],
		[0.5, 0.6, 'N'],
		[0.6, 0.7, 'AW1'],
	]), rules)
	assert.deepEqual(entries.map(e => e.label), ['G-OW', 'N-AW'])
	assert.equal(entries[1].startSec, 0.5)
})

test('alignment text round trip', () => {
	const entries = syllabify(phones([
		[0.0, 0.08, 'HH'],
		[0.08, 0.2, 'EH1'],
		[0.2, 0.31, 'L'],
		[0.31, 0.45, 'OW0'],
	]), rules)
	assert.deepEqual(decodeAlignment(encodeAlignment(entries)), entries)
})
