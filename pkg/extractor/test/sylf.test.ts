import assert from 'node:assert/strict'
import { test } from 'node:test'

import { decodeSylf, encodeSylf, SylfFormatError } from '../src/sylf.js'

test('sylf round trip preserves header and payload', () => {
	const frames = {
		dim: 3,
		nFrames: 2,
		frameRateHz: 50,
		data: new Float32Array([1, 2, 3, 4, 5, 6]),
	}
	const decoded = decodeSylf(encodeSylf(frames))
	assert.equal(decoded.dim, 3)
	assert.equal(decoded.nFrames, 2)
	assert.equal(decoded.frameRateHz, 50)
	assert.deepEqual(Array.from(decoded.data), [1, 2, 3, 4, 5, 6])
})

test('sylf header layout is exact', () => {
	const buffer = encodeSylf({ dim: 1, nFrames: 1, frameRateHz: 50, data: new Float32Array([2.5]) })
	assert.equal(buffer.toString('ascii', 0, 4), 'SYLF')
	assert.equal(buffer.readUInt32LE(4), 1)    // version
	assert.equal(buffer.readUInt32LE(8), 1)    // dim
	assert.equal(buffer.readUInt32LE(12), 1)   // n_frames
	assert.equal(buffer.readFloatLE(16), 50)   // frame rate
	assert.equal(buffer.readFloatLE(20), 2.5)
	assert.equal(buffer.length, 24)
})

test('sylf encoder rejects invalid input', () => {
	assert.throws(
		() => encodeSylf({ dim: 2, nFrames: 2, frameRateHz: 50, data: new Float32Array(3) }),
		SylfFormatError)
	assert.throws(
		() => encodeSylf({ dim: 1, nFrames: 1, frameRateHz: 50, data: new Float32Array([NaN]) }),
		SylfFormatError)
})

test('sylf empty matrix is valid', () => {
	const decoded = decodeSylf(encodeSylf({
		dim: 4, nFrames: 0, frameRateHz: 50, data: new Float32Array(0),
	}))
	assert.equal(decoded.nFrames, 0)
	assert.equal(decoded.dim, 4)
})
